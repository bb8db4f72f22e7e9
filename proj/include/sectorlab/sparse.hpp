#pragma once

// Compressed-row sparse matrices, reverse Cuthill-McKee ordering, an
// envelope (skyline) Cholesky factorization for SPD systems, and a banded
// LU with partial pivoting for symmetric indefinite Jacobians.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectorlab/errors.hpp"

namespace sectorlab {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Duplicates are summed, explicit zeros dropped, columns sorted per row.
    static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> entries, bool symmetric) {
        for (const auto& t : entries) {
            if (t.row >= n || t.col >= n) throw DomainError("triplet index out of range");
        }
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix m;
        m.n_ = n;
        m.symmetric_ = symmetric;
        m.offsets_.assign(n + 1, 0);
        std::size_t k = 0;
        while (k < entries.size()) {
            const std::size_t r = entries[k].row;
            const std::size_t c = entries[k].col;
            double v = 0.0;
            while (k < entries.size() && entries[k].row == r && entries[k].col == c) v += entries[k++].value;
            if (v != 0.0) {
                m.cols_.push_back(c);
                m.vals_.push_back(v);
                ++m.offsets_[r + 1];
            }
        }
        std::partial_sum(m.offsets_.begin(), m.offsets_.end(), m.offsets_.begin());
        return m;
    }

    std::size_t dim() const noexcept { return n_; }
    std::size_t nonzeros() const noexcept { return vals_.size(); }
    bool symmetric_flag() const noexcept { return symmetric_; }
    std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return cols_; }
    std::span<const double> values() const noexcept { return vals_; }

    std::span<const std::size_t> row_cols(std::size_t r) const {
        return {cols_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }
    std::span<const double> row_vals(std::size_t r) const {
        return {vals_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }

    double at(std::size_t r, std::size_t c) const {
        const auto cs = row_cols(r);
        const auto it = std::lower_bound(cs.begin(), cs.end(), c);
        if (it == cs.end() || *it != c) return 0.0;
        return vals_[offsets_[r] + static_cast<std::size_t>(it - cs.begin())];
    }

    void multiply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t r = 0; r < n_; ++r) {
            double s = 0.0;
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += vals_[k] * x[cols_[k]];
            y[r] = s;
        }
    }
    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(n_);
        multiply(x, y);
        return y;
    }

    /// A + diag(d).
    SparseMatrix plus_diagonal(std::span<const double> d) const {
        std::vector<Triplet> t;
        t.reserve(vals_.size() + n_);
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) t.push_back({r, cols_[k], vals_[k]});
            t.push_back({r, r, d[r]});
        }
        return from_triplets(n_, std::move(t), symmetric_);
    }

    /// B(k, l) = A(perm[k], perm[l]).
    SparseMatrix permuted(std::span<const std::size_t> perm) const {
        std::vector<std::size_t> inverse(n_);
        for (std::size_t k = 0; k < n_; ++k) inverse[perm[k]] = k;
        std::vector<Triplet> t;
        t.reserve(vals_.size());
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                t.push_back({inverse[r], inverse[cols_[k]], vals_[k]});
            }
        }
        return from_triplets(n_, std::move(t), symmetric_);
    }

    /// max |A_ij - A_ji| <= rel_tol * max |A_ij|.
    bool is_symmetric(double rel_tol) const {
        double scale = 0.0;
        for (double v : vals_) scale = std::max(scale, std::abs(v));
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                if (std::abs(vals_[k] - at(cols_[k], r)) > rel_tol * scale) return false;
            }
        }
        return true;
    }

private:
    std::size_t n_ = 0;
    bool symmetric_ = false;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

namespace detail {

inline std::vector<std::size_t> bfs_levels(const SparseMatrix& a, std::size_t start, std::vector<long>& level) {
    std::vector<std::size_t> order{start};
    std::fill(level.begin(), level.end(), -1);
    level[start] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        const std::size_t v = order[head];
        for (std::size_t w : a.row_cols(v)) {
            if (level[w] < 0) {
                level[w] = level[v] + 1;
                order.push_back(w);
            }
        }
    }
    return order;
}

}  // namespace detail

/// Reverse Cuthill-McKee ordering of the (structurally symmetric) graph of
/// a; perm[k] is the original index placed at position k. Each connected
/// component starts from a pseudo-peripheral node; ties break by index so
/// the ordering is deterministic.
inline std::vector<std::size_t> rcm_ordering(const SparseMatrix& a) {
    const std::size_t n = a.dim();
    std::vector<std::size_t> degree(n);
    for (std::size_t v = 0; v < n; ++v) degree[v] = a.row_cols(v).size();
    std::vector<bool> placed(n, false);
    std::vector<long> level(n, -1);
    std::vector<std::size_t> perm;
    perm.reserve(n);

    for (std::size_t seed = 0; seed < n; ++seed) {
        if (placed[seed]) continue;
        // Component of seed, restricted to unplaced nodes (components are
        // disjoint so BFS never reaches placed nodes).
        std::size_t start = seed;
        {
            const auto comp = detail::bfs_levels(a, seed, level);
            for (std::size_t v : comp) {
                if (degree[v] < degree[start] || (degree[v] == degree[start] && v < start)) start = v;
            }
        }
        long ecc = -1;
        for (int sweep = 0; sweep < 8; ++sweep) {
            const auto order = detail::bfs_levels(a, start, level);
            const long depth = level[order.back()];
            if (depth <= ecc) break;
            ecc = depth;
            std::size_t best = order.back();
            for (std::size_t v : order) {
                if (level[v] == depth && (degree[v] < degree[best] || (degree[v] == degree[best] && v < best))) {
                    best = v;
                }
            }
            start = best;
        }

        std::deque<std::size_t> queue{start};
        placed[start] = true;
        std::vector<std::size_t> nbrs;
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            perm.push_back(v);
            nbrs.clear();
            for (std::size_t w : a.row_cols(v)) {
                if (!placed[w]) {
                    placed[w] = true;
                    nbrs.push_back(w);
                }
            }
            std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t x, std::size_t y) {
                return degree[x] != degree[y] ? degree[x] < degree[y] : x < y;
            });
            for (std::size_t w : nbrs) queue.push_back(w);
        }
    }
    std::reverse(perm.begin(), perm.end());
    return perm;
}

/// Envelope Cholesky A = L L^T of a symmetric positive definite matrix in a
/// fill-reducing ordering. Row i of L is stored densely from its first
/// structural nonzero column to the diagonal.
class EnvelopeCholesky {
public:
    /// Factor P A P^T with the RCM ordering of A. Returns nullopt when a
    /// pivot is not safely positive (A not positive definite).
    static std::optional<EnvelopeCholesky> factor(const SparseMatrix& a) {
        return factor(a, rcm_ordering(a));
    }

    static std::optional<EnvelopeCholesky> factor(const SparseMatrix& a, std::vector<std::size_t> perm) {
        EnvelopeCholesky c;
        const std::size_t n = a.dim();
        c.n_ = n;
        c.perm_ = std::move(perm);
        const SparseMatrix b = a.permuted(c.perm_);

        c.first_.resize(n);
        c.offset_.resize(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t f = i;
            for (std::size_t col : b.row_cols(i)) f = std::min(f, col);
            c.first_[i] = f;
            c.offset_[i + 1] = c.offset_[i] + (i - f + 1);
        }
        c.data_.assign(c.offset_[n], 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto cols = b.row_cols(i);
            const auto vals = b.row_vals(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] <= i) c.data_[c.offset_[i] + cols[k] - c.first_[i]] = vals[k];
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            double* row_i = c.data_.data() + c.offset_[i];
            const std::size_t fi = c.first_[i];
            for (std::size_t j = fi; j < i; ++j) {
                const double* row_j = c.data_.data() + c.offset_[j];
                const std::size_t fj = c.first_[j];
                const std::size_t k0 = std::max(fi, fj);
                double s = row_i[j - fi];
                for (std::size_t k = k0; k < j; ++k) s -= row_i[k - fi] * row_j[k - fj];
                row_i[j - fi] = s / row_j[j - fj];
            }
            const double diag = row_i[i - fi];
            double d = diag;
            for (std::size_t k = fi; k < i; ++k) d -= row_i[k - fi] * row_i[k - fi];
            if (!(d > 1e-14 * std::abs(diag)) || !std::isfinite(d)) return std::nullopt;
            row_i[i - fi] = std::sqrt(d);
        }
        return c;
    }

    std::size_t dim() const noexcept { return n_; }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        std::vector<double> y(n_);
        for (std::size_t k = 0; k < n_; ++k) y[k] = rhs[perm_[k]];
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = data_.data() + offset_[i];
            const std::size_t fi = first_[i];
            double s = y[i];
            for (std::size_t k = fi; k < i; ++k) s -= row[k - fi] * y[k];
            y[i] = s / row[i - fi];
        }
        for (std::size_t i = n_; i-- > 0;) {
            const double* row = data_.data() + offset_[i];
            const std::size_t fi = first_[i];
            y[i] /= row[i - fi];
            const double yi = y[i];
            for (std::size_t k = fi; k < i; ++k) y[k] -= row[k - fi] * yi;
        }
        for (std::size_t k = 0; k < n_; ++k) x[perm_[k]] = y[k];
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(n_);
        solve(rhs, x);
        return x;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> first_;
    std::vector<std::size_t> offset_;
    std::vector<double> data_;
};

/// Banded LU with partial pivoting of P A P^T (RCM ordering), for square
/// systems that may be indefinite.
class BandLU {
public:
    static BandLU factor(const SparseMatrix& a) {
        BandLU f;
        const std::size_t n = a.dim();
        f.n_ = n;
        f.perm_ = rcm_ordering(a);
        const SparseMatrix b = a.permuted(f.perm_);
        std::size_t kl = 0;
        std::size_t ku = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c : b.row_cols(i)) {
                if (c < i) kl = std::max(kl, i - c);
                if (c > i) ku = std::max(ku, c - i);
            }
        }
        f.kl_ = kl;
        f.reach_ = kl + ku;
        f.width_ = 2 * kl + ku + 1;
        f.data_.assign(n * f.width_, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto cols = b.row_cols(i);
            const auto vals = b.row_vals(i);
            for (std::size_t k = 0; k < cols.size(); ++k) f.ref(i, cols[k]) = vals[k];
        }
        f.pivot_.resize(n);

        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t last_row = std::min(n - 1, k + kl);
            const std::size_t last_col = std::min(n - 1, k + f.reach_);
            std::size_t p = k;
            double best = std::abs(f.ref(k, k));
            for (std::size_t i = k + 1; i <= last_row; ++i) {
                if (std::abs(f.ref(i, k)) > best) {
                    best = std::abs(f.ref(i, k));
                    p = i;
                }
            }
            f.pivot_[k] = p;
            if (best == 0.0) throw ConvergenceError("BandLU: exactly singular matrix", 0.0);
            if (p != k) {
                for (std::size_t c = k; c <= last_col; ++c) std::swap(f.ref(k, c), f.ref(p, c));
            }
            const double piv = f.ref(k, k);
            for (std::size_t i = k + 1; i <= last_row; ++i) {
                double& lik = f.ref(i, k);
                if (lik == 0.0) continue;
                lik /= piv;
                const double l = lik;
                for (std::size_t c = k + 1; c <= last_col; ++c) f.ref(i, c) -= l * f.ref(k, c);
            }
        }
        return f;
    }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        std::vector<double> y(n_);
        for (std::size_t k = 0; k < n_; ++k) y[k] = rhs[perm_[k]];
        for (std::size_t k = 0; k < n_; ++k) {
            if (pivot_[k] != k) std::swap(y[k], y[pivot_[k]]);
            const std::size_t last_row = std::min(n_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= last_row; ++i) y[i] -= cref(i, k) * y[k];
        }
        for (std::size_t k = n_; k-- > 0;) {
            const std::size_t last_col = std::min(n_ - 1, k + reach_);
            double s = y[k];
            for (std::size_t c = k + 1; c <= last_col; ++c) s -= cref(k, c) * y[c];
            y[k] = s / cref(k, k);
        }
        for (std::size_t k = 0; k < n_; ++k) x[perm_[k]] = y[k];
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(n_);
        solve(rhs, x);
        return x;
    }

private:
    double& ref(std::size_t i, std::size_t c) { return data_[i * width_ + (c + kl_ - i)]; }
    double cref(std::size_t i, std::size_t c) const { return data_[i * width_ + (c + kl_ - i)]; }

    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t reach_ = 0;
    std::size_t width_ = 0;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> pivot_;
    std::vector<double> data_;
};

}  // namespace sectorlab
