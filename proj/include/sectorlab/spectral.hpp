#pragma once

// Low-lying eigenpairs of the symmetric pencil (A - M V) x = lambda M x and
// Morse index extraction.
//
// Method: block shift-invert subspace iteration with Rayleigh-Ritz and
// locking. The shift starts below the Gershgorin lower bound of M^{-1} K,
// which makes K - sigma M positive definite, so every solve goes through an
// envelope Cholesky factorization. The shift is later moved up toward the
// smallest Ritz value; a failed Cholesky (inertia test) proves the proposal
// overshot lambda_1 and the previous shift is kept. Converged leading Ritz
// vectors are locked and the active block is M-orthogonalized against them
// on every sweep.
//
// Residuals are reported as ||K x - lambda M x||_{M^{-1}} for M-normalized x,
// i.e. the L^2 norm of the residual function; a pair is accepted when this
// is <= tol * max(1, |lambda|, |Gershgorin bound|); the last term keeps the
// test above roundoff when a large potential shifts lambda toward zero.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sectorlab/dense.hpp"
#include "sectorlab/discretization.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/sparse.hpp"

namespace sectorlab {

struct EigenOptions {
    double tol = 1e-8;
    int max_iterations = 3000;
    std::size_t extra_vectors = 6;  // block size is max(2m, m + extra)
    std::uint64_t seed = 0x5ec70a1b5eedULL;
};

/// Eigenpairs of a pencil in free-node coordinates.
struct PencilEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // M-orthonormal
    std::vector<double> residuals;
    double shift = 0.0;
    int iterations = 0;
};

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline double m_dot(std::span<const double> x, std::span<const double> y, std::span<const double> mass) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += mass[k] * x[k] * y[k];
    return s;
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

/// Uniform in [-1, 1) from raw 64-bit output; independent of the standard
/// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

/// M-orthonormalize `block` against `locked` and itself (two passes of
/// modified Gram-Schmidt). Collapsed vectors are replaced by fresh random
/// ones.
inline void m_orthonormalize(std::vector<std::vector<double>>& block, const std::vector<std::vector<double>>& locked,
                             std::span<const double> mass, std::mt19937_64& rng) {
    for (std::size_t k = 0; k < block.size(); ++k) {
        auto& x = block[k];
        const double before = std::sqrt(std::max(m_dot(x, x, mass), 0.0));
        for (int attempt = 0; attempt < 4; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : locked) axpy(-m_dot(q, x, mass), q, x);
                for (std::size_t l = 0; l < k; ++l) axpy(-m_dot(block[l], x, mass), block[l], x);
            }
            const double nrm = std::sqrt(std::max(m_dot(x, x, mass), 0.0));
            if (nrm > 1e-10 * before && nrm > 0.0) {
                for (double& v : x) v /= nrm;
                break;
            }
            for (double& v : x) v = unit_uniform(rng);
        }
    }
}

/// Bounds of the pencil spectrum from Gershgorin discs of M^{-1} K.
inline std::pair<double, double> gershgorin_bounds(const SparseMatrix& k, std::span<const double> mass) {
    double lb = std::numeric_limits<double>::infinity();
    double ub = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < k.dim(); ++r) {
        double diag = 0.0;
        double off = 0.0;
        const auto cols = k.row_cols(r);
        const auto vals = k.row_vals(r);
        for (std::size_t q = 0; q < cols.size(); ++q) {
            if (cols[q] == r) {
                diag = vals[q];
            } else {
                off += std::abs(vals[q]);
            }
        }
        lb = std::min(lb, (diag - off) / mass[r]);
        ub = std::max(ub, (diag + off) / mass[r]);
    }
    return {lb, ub};
}

inline double gershgorin_lower_bound(const SparseMatrix& k, std::span<const double> mass) {
    return gershgorin_bounds(k, mass).first;
}

/// 10 eps ||(|K| + |lambda| M)|x|||_{M^{-1}}: the residual level reachable in
/// floating point for the pair (lambda, x).
inline double roundoff_floor(const SparseMatrix& k, std::span<const double> mass, std::span<const double> x,
                             double lambda) {
    double acc = 0.0;
    for (std::size_t r = 0; r < k.dim(); ++r) {
        const auto cols = k.row_cols(r);
        const auto vals = k.row_vals(r);
        double t = std::abs(lambda) * mass[r] * std::abs(x[r]);
        for (std::size_t q = 0; q < cols.size(); ++q) t += std::abs(vals[q] * x[cols[q]]);
        acc += t * t / mass[r];
    }
    return 10.0 * std::numeric_limits<double>::epsilon() * std::sqrt(acc);
}

inline std::optional<EnvelopeCholesky> factor_shifted(const SparseMatrix& k, std::span<const double> mass,
                                                      double sigma, const std::vector<std::size_t>& perm) {
    std::vector<double> d(mass.size());
    for (std::size_t r = 0; r < mass.size(); ++r) d[r] = -sigma * mass[r];
    return EnvelopeCholesky::factor(k.plus_diagonal(d), perm);
}

}  // namespace detail

/// The m algebraically smallest eigenpairs of K x = lambda M x (K symmetric,
/// M positive diagonal).
inline PencilEigen smallest_pencil_eigenpairs(const SparseMatrix& k, std::span<const double> mass, std::size_t m,
                                              const EigenOptions& opt = {}) {
    const std::size_t n = k.dim();
    if (m < 1 || m > n) throw DomainError("requested eigenpair count must be in [1, number of free nodes]");
    if (mass.size() != n) throw DomainError("mass length does not match operator");
    const std::size_t block = std::min(n, std::max(2 * m, m + opt.extra_vectors));
    const std::vector<std::size_t> perm = rcm_ordering(k);

    const double gersh = detail::gershgorin_lower_bound(k, mass);
    double sigma = gersh - std::max(1.0, 1e-3 * std::abs(gersh));
    auto chol = detail::factor_shifted(k, mass, sigma, perm);
    if (!chol) throw ConvergenceError("shifted pencil is not positive definite below the Gershgorin bound", 0.0);

    std::mt19937_64 rng(opt.seed);
    std::vector<std::vector<double>> active(block, std::vector<double>(n));
    for (auto& x : active) {
        for (double& v : x) v = detail::unit_uniform(rng);
    }
    std::vector<std::vector<double>> locked;
    std::vector<double> locked_values;
    std::vector<double> locked_residuals;
    detail::m_orthonormalize(active, locked, mass, rng);

    std::vector<double> rhs(n);
    std::vector<double> kx(n);
    std::vector<double> ritz;
    double worst_residual = std::numeric_limits<double>::infinity();
    double best_pending = std::numeric_limits<double>::infinity();
    int last_progress = 0;
    int shift_updates = 0;
    const int shift_schedule[] = {2, 5, 12, 25, 50, 100};

    PencilEigen out;
    int it = 0;
    for (; it < opt.max_iterations && locked.size() < m; ++it) {
        for (auto& x : active) {
            for (std::size_t r = 0; r < n; ++r) rhs[r] = mass[r] * x[r];
            chol->solve(rhs, x);
        }
        detail::m_orthonormalize(active, locked, mass, rng);

        // Rayleigh-Ritz on span(active).
        const std::size_t p = active.size();
        std::vector<std::vector<double>> kactive(p, std::vector<double>(n));
        for (std::size_t a = 0; a < p; ++a) k.multiply(active[a], kactive[a]);
        std::vector<double> h(p * p);
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = a; b < p; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) s += active[a][r] * kactive[b][r];
                h[a * p + b] = s;
                h[b * p + a] = s;
            }
        }
        const SymmetricEigen eig = symmetric_eigen(std::move(h), p);
        std::vector<std::vector<double>> rotated(p, std::vector<double>(n, 0.0));
        std::vector<std::vector<double>> krotated(p, std::vector<double>(n, 0.0));
        for (std::size_t c = 0; c < p; ++c) {
            for (std::size_t a = 0; a < p; ++a) {
                const double w = eig.vectors[a * p + c];
                if (w == 0.0) continue;
                detail::axpy(w, active[a], rotated[c]);
                detail::axpy(w, kactive[a], krotated[c]);
            }
        }
        active = std::move(rotated);
        ritz = eig.values;

        // Lock leading converged pairs.
        std::size_t newly = 0;
        while (newly < active.size() && locked.size() + newly < m) {
            const auto& x = active[newly];
            const auto& kxv = krotated[newly];
            const double lam = ritz[newly];
            double res = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double e = kxv[r] - lam * mass[r] * x[r];
                res += e * e / mass[r];
            }
            res = std::sqrt(res);
            worst_residual = res;
            const double allowed = opt.tol * std::max({1.0, std::abs(lam), std::abs(gersh)});
            if (res > allowed && res > detail::roundoff_floor(k, mass, x, lam)) break;
            locked.push_back(x);
            locked_values.push_back(lam);
            locked_residuals.push_back(res);
            ++newly;
        }
        if (newly > 0) {
            active.erase(active.begin(), active.begin() + static_cast<long>(newly));
            ritz.erase(ritz.begin(), ritz.begin() + static_cast<long>(newly));
        }
        if (locked.size() >= m) break;
        if (newly > 0 || worst_residual < 0.5 * best_pending) {
            best_pending = newly > 0 ? std::numeric_limits<double>::infinity() : worst_residual;
            last_progress = it;
        } else if (it - last_progress > 200) {
            ++it;
            break;  // stagnated at the roundoff floor
        }

        // Move the shift toward the bottom of the spectrum.
        if (shift_updates < 6 && it + 1 == shift_schedule[shift_updates]) {
            ++shift_updates;
            const double bottom = locked_values.empty() ? ritz.front() : locked_values.front();
            const double top = ritz.back();
            double proposal = bottom - 0.02 * (top - bottom) - 1e-8 * std::abs(bottom);
            for (int attempt = 0; attempt < 4 && proposal > sigma; ++attempt) {
                auto trial = detail::factor_shifted(k, mass, proposal, perm);
                if (trial) {
                    sigma = proposal;
                    chol = std::move(trial);
                    break;
                }
                proposal = 0.5 * (proposal + sigma);
            }
        }
    }
    if (locked.size() < m) {
        throw ConvergenceError("eigensolver did not converge after " + std::to_string(it) + " iterations (" +
                                   std::to_string(locked.size()) + " of " + std::to_string(m) +
                                   " pairs locked, residual " + detail::sci(worst_residual) + ")",
                               worst_residual);
    }

    std::vector<std::size_t> order(m);
    for (std::size_t a = 0; a < m; ++a) order[a] = a;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return locked_values[a] < locked_values[b]; });
    for (std::size_t a : order) {
        out.values.push_back(locked_values[a]);
        out.vectors.push_back(std::move(locked[a]));
        out.residuals.push_back(locked_residuals[a]);
    }
    out.shift = sigma;
    out.iterations = it + 1;
    return out;
}

/// Sorted eigenpairs of L_u in one boundary space.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<ScalarField> eigenvectors;  // M-normalized, zero on eliminated nodes
    SpaceTag space;
    std::vector<double> residuals;
    double shift = 0.0;
    int iterations = 0;
};

/// Sign convention: the first component whose magnitude exceeds 1e-8 of the
/// vector's sup norm is made positive.
inline void fix_sign(std::vector<double>& x) {
    double sup = 0.0;
    for (double v : x) sup = std::max(sup, std::abs(v));
    for (double v : x) {
        if (std::abs(v) > 1e-8 * sup) {
            if (v < 0.0) {
                for (double& w : x) w = -w;
            }
            return;
        }
    }
}

inline Spectrum smallest_eigenpairs(const OperatorSet& ops, std::size_t m, double tol = 1e-8,
                                    EigenOptions opt = {}) {
    opt.tol = tol;
    PencilEigen pe = smallest_pencil_eigenpairs(ops.operator_matrix(), ops.mass, m, opt);
    Spectrum s;
    s.space = ops.space;
    s.shift = pe.shift;
    s.iterations = pe.iterations;
    s.eigenvalues = std::move(pe.values);
    s.residuals = std::move(pe.residuals);
    for (auto& x : pe.vectors) {
        fix_sign(x);
        s.eigenvectors.push_back(prolong(x, ops.map, ops.grid));
    }
    return s;
}

struct MorseReport {
    int index = 0;
    int zero_modes = 0;
    double zero_tol = 0.0;
    bool possibly_undercounted = false;  // the last computed eigenvalue is itself negative
};

/// 10 h^2 (max |V| + 1): the continuum zero eigenvalue is resolved only to
/// discretization order.
inline double default_zero_tol(const OperatorSet& ops) {
    const double h = ops.grid.h();
    return 10.0 * h * h * (ops.max_abs_potential() + 1.0);
}

inline MorseReport morse_index(const Spectrum& spec, double zero_tol) {
    if (!(zero_tol >= 0.0)) throw DomainError("zero_tol must be nonnegative");
    MorseReport r;
    r.zero_tol = zero_tol;
    for (double lam : spec.eigenvalues) {
        if (lam < -zero_tol) {
            ++r.index;
        } else if (std::abs(lam) <= zero_tol) {
            ++r.zero_modes;
        }
    }
    r.possibly_undercounted = !spec.eigenvalues.empty() && spec.eigenvalues.back() < -zero_tol;
    return r;
}

/// Consecutive pairs (k, k+1) closer than tol + rel * max(|lambda_k|,
/// |lambda_k+1|); their order is not resolved by the discretization and both
/// modes must be reported.
inline std::vector<std::pair<std::size_t, std::size_t>> near_degenerate_pairs(const Spectrum& spec, double tol,
                                                                             double rel = 0.0) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k + 1 < spec.eigenvalues.size(); ++k) {
        const double a = spec.eigenvalues[k];
        const double b = spec.eigenvalues[k + 1];
        if (std::abs(b - a) < tol + rel * std::max(std::abs(a), std::abs(b))) out.emplace_back(k, k + 1);
    }
    return out;
}

struct SplittingCheck {
    double lhs = 0.0;           // lambda_2 in H1_gamma(Omega_{0 beta})
    double rhs = 0.0;           // max of the two half-sector lambda_1
    double lambda1_below = 0.0; // Omega_{0 alpha}
    double lambda1_above = 0.0; // Omega_{alpha beta}
    double slack = 0.0;
    bool holds = false;
    std::size_t column = 0;
    double alpha_snapped = 0.0;
    double mismatch = 0.0;
};

/// lambda_2(H1_gamma) <= max(lambda_1 of the two sub-sectors cut by a
/// Dirichlet ray at alpha), with slack C h^2 (C = max|V| + 1).
inline SplittingCheck splitting_inequality_check(const TensorGrid& g, std::span<const double> node_potential,
                                                 double alpha, double tol = 1e-9) {
    const SnappedLine line = snap_to_column(g, alpha);
    SplittingCheck c;
    c.column = line.column;
    c.alpha_snapped = static_cast<double>(line.column) * g.h_theta();
    c.mismatch = line.mismatch;

    const OperatorSet whole = assemble_operator(g, SpaceTag::mixed(), node_potential);
    const OperatorSet below =
        assemble_operator(g, SpaceTag::interior_line(line.column, SpaceTag::Side::Below), node_potential);
    const OperatorSet above =
        assemble_operator(g, SpaceTag::interior_line(line.column, SpaceTag::Side::Above), node_potential);

    c.lhs = smallest_eigenpairs(whole, 2, tol).eigenvalues[1];
    c.lambda1_below = smallest_eigenpairs(below, 1, tol).eigenvalues[0];
    c.lambda1_above = smallest_eigenpairs(above, 1, tol).eigenvalues[0];
    c.rhs = std::max(c.lambda1_below, c.lambda1_above);
    const double h = g.h();
    c.slack = h * h * (whole.max_abs_potential() + 1.0);
    c.holds = c.lhs <= c.rhs + c.slack;
    return c;
}

}  // namespace sectorlab
