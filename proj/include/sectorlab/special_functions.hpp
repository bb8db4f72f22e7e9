#pragma once

// Real-order Bessel functions of the first kind, their positive zeros, and
// the eigenvalue catalog of the mixed Dirichlet/Neumann problem on a disc
// sector.
//
// Evaluation strategy for J_nu(x):
//   * x <= kSeriesRadius (= 8): ascending power series, summed until the
//     terms drop below 1e-17 of the running sum.
//   * x >  kSeriesRadius: Miller downward recurrence started well above
//     max(x, nu), normalized with the Neumann-type sum
//         (x/2)^nu / Gamma(nu+1) = J_nu + sum_{k>=1} c_k J_{nu+2k},
//         c_k = (nu+2k) (nu+1)_{k-1} / k!,
//     which reduces to 1 = J_0 + 2 sum J_{2k} at nu = 0.
// Both branches are checked against an independent reference in the tests
// to 1e-10 absolute for x <= 100, nu <= 50.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sectorlab/errors.hpp"

namespace sectorlab {

/// Order nu >= 0 of a Bessel function. Implicitly constructible from double
/// so that call sites read `bessel_j(2.0, x)`; validation happens here.
class BesselOrder {
public:
    BesselOrder(double nu) : nu_(nu) {  // NOLINT(google-explicit-constructor)
        if (!std::isfinite(nu) || nu < 0.0) {
            throw DomainError("Bessel order must be finite and nonnegative, got " + std::to_string(nu));
        }
    }
    double value() const noexcept { return nu_; }

private:
    double nu_;
};

/// 1-based index of a positive zero.
class ZeroIndex {
public:
    ZeroIndex(int k) : k_(k) {  // NOLINT(google-explicit-constructor)
        if (k < 1) throw DomainError("zero index must be >= 1, got " + std::to_string(k));
    }
    int value() const noexcept { return k_; }

private:
    int k_;
};

inline constexpr double kSeriesRadius = 8.0;
inline constexpr double kMaxBesselArgument = 1.0e6;

namespace detail {

inline double bessel_j_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= -q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    const double log_prefactor = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    return std::exp(log_prefactor) * sum;
}

inline double bessel_j_miller(double nu, double x) {
    const double top = std::max(x, nu);
    const auto n_start = static_cast<std::size_t>(std::ceil(top - nu + 30.0 + 4.0 * std::sqrt(top)));

    // Weights c_k for k = 1 .. n_start/2, built in log space.
    const double lg_nu1 = std::lgamma(nu + 1.0);
    auto weight = [&](std::size_t k) {
        const auto kd = static_cast<double>(k);
        return (nu + 2.0 * kd) * std::exp(std::lgamma(nu + kd) - lg_nu1 - std::lgamma(kd + 1.0));
    };

    constexpr double kHuge = 1e250;
    double f_above = 0.0;   // f_{n+1}
    double f_here = 1e-300; // f_n
    double norm = 0.0;
    for (std::size_t n = n_start; n > 0; --n) {
        if ((n % 2) == 0) norm += weight(n / 2) * f_here;
        const double mu = nu + static_cast<double>(n);
        const double f_below = (2.0 * mu / x) * f_here - f_above;
        f_above = f_here;
        f_here = f_below;
        if (std::abs(f_here) > kHuge) {
            f_here /= kHuge;
            f_above /= kHuge;
            norm /= kHuge;
        }
    }
    norm += f_here;
    const double log_prefactor = nu * std::log(0.5 * x) - lg_nu1;
    return std::exp(log_prefactor) * f_here / norm;
}

}  // namespace detail

/// J_nu(x) for nu >= 0, 0 <= x <= 1e6.
inline double bessel_j(BesselOrder order, double x) {
    const double nu = order.value();
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("bessel_j: argument must be finite and nonnegative, got " + std::to_string(x));
    }
    if (x > kMaxBesselArgument) {
        throw RangeError("bessel_j: argument beyond supported range 1e6");
    }
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double value = x <= kSeriesRadius ? detail::bessel_j_series(nu, x) : detail::bessel_j_miller(nu, x);
    if (!std::isfinite(value)) {
        throw RangeError("bessel_j: non-finite result for nu=" + std::to_string(nu) + ", x=" + std::to_string(x));
    }
    return value;
}

/// dJ_nu/dx via J'_nu = (nu/x) J_nu - J_{nu+1}; valid for every nu >= 0.
inline double bessel_j_derivative(BesselOrder order, double x) {
    const double nu = order.value();
    if (x == 0.0) {
        if (nu == 1.0) return 0.5;
        return 0.0 < nu && nu < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

/// Upper end of the bracketing scan for the k-th zero of J_nu. The zeros
/// satisfy j_{nu,k} < nu + 1.86 nu^{1/3} + (k - 1/4) pi + 1 for every
/// nu >= 0, so this bound leaves ample room.
inline double zero_search_bound(double nu, int k) {
    return nu + 4.0 * std::cbrt(nu + 1.0) + (static_cast<double>(k) + 2.0) * std::numbers::pi + 10.0;
}

/// k-th positive zero j_{nu,k}, absolute error below 1e-8 (typically at
/// round-off). Bracketing scans upward from x = nu in steps of pi/4, a
/// quarter of the asymptotic zero spacing; the sign change is narrowed by
/// bisection to width 1e-6 and then polished by safeguarded Newton.
inline double bessel_zero(BesselOrder order, ZeroIndex index) {
    const double nu = order.value();
    const int k = index.value();
    const double step = 0.25 * std::numbers::pi;
    const double bound = zero_search_bound(nu, k);

    double a = std::max(nu, 1e-3);
    double fa = bessel_j(nu, a);
    int found = 0;
    double lo = 0.0;
    double hi = 0.0;
    while (a < bound) {
        const double b = a + step;
        const double fb = bessel_j(nu, b);
        if (fb == 0.0) {
            if (++found == k) return b;
            // Step over the exact zero so the next interval starts off it.
            a = b + 1e-9;
            fa = bessel_j(nu, a);
            continue;
        }
        if ((fa < 0.0) != (fb < 0.0)) {
            if (++found == k) {
                lo = a;
                hi = b;
                break;
            }
        }
        a = b;
        fa = fb;
    }
    if (found < k) {
        throw ConvergenceError("bessel_zero: failed to bracket zero k=" + std::to_string(k) + " of J_" +
                                   std::to_string(nu) + " below x=" + std::to_string(bound),
                               bound);
    }

    double flo = bessel_j(nu, lo);
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j(nu, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 20; ++it) {
        const double fx = bessel_j(nu, x);
        const double dfx = (nu / x) * fx - bessel_j(nu + 1.0, x);
        if (dfx == 0.0) break;
        double next = x - fx / dfx;
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
        } else {
            hi = x;
        }
        const bool done = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x;
        x = next;
        if (done) break;
    }
    return x;
}

/// Opening angle beta in (0, 2 pi) with j_{pi/beta, 1} = target, found by
/// bisection in s = pi/beta on the strictly increasing map s -> j_{s,1}.
/// Admissible s are s > 1/2, so targets must exceed j_{1/2,1} = pi.
inline double critical_angle(double target) {
    constexpr double pi = std::numbers::pi;
    if (!std::isfinite(target) || target <= pi) {
        throw DomainError("critical_angle: no opening in (0, 2pi) has j_{pi/beta,1} = " + std::to_string(target) +
                          " (targets must exceed pi)");
    }
    auto first_zero = [](double s) { return bessel_zero(s, 1); };
    double s_lo = 0.5;
    double s_hi = 1.0;
    while (first_zero(s_hi) < target) {
        s_lo = s_hi;
        s_hi *= 2.0;
        if (s_hi > 1e4) throw DomainError("critical_angle: target beyond supported range");
    }
    while (s_hi - s_lo > 1e-14 * s_hi) {
        const double mid = 0.5 * (s_lo + s_hi);
        if (first_zero(mid) < target) {
            s_lo = mid;
        } else {
            s_hi = mid;
        }
    }
    return pi / (0.5 * (s_lo + s_hi));
}

/// The opening at which the radial mode (0,2) and the first angular mode
/// (1,1) of the mixed sector problem share an eigenvalue.
inline double mode_crossing_angle() { return critical_angle(bessel_zero(0.0, 2)); }

/// Eigenpair label (n, k): psi_nk = J_{s_n}(j_{s_n,k} r) cos(s_n theta),
/// s_n = n pi / beta, eigenvalue j_{s_n,k}^2.
struct CatalogEntry {
    double lambda;
    int n;
    int k;
};

/// Exact eigenvalues of -Delta on the unit disc sector of opening beta with
/// Dirichlet data on the arc and Neumann data on both radii, for
/// 0 <= n <= n_max, 1 <= k <= k_max, ascending with (n, k) tie-break.
inline std::vector<CatalogEntry> eigen_catalog(double beta, int n_max, int k_max) {
    if (!(beta > 0.0 && beta < 2.0 * std::numbers::pi)) {
        throw DomainError("eigen_catalog: opening must lie in (0, 2pi)");
    }
    if (n_max < 1 || k_max < 1) throw DomainError("eigen_catalog: n_max and k_max must be >= 1");
    std::vector<CatalogEntry> out;
    out.reserve(static_cast<std::size_t>((n_max + 1) * k_max));
    for (int n = 0; n <= n_max; ++n) {
        const double s = static_cast<double>(n) * std::numbers::pi / beta;
        for (int k = 1; k <= k_max; ++k) {
            const double j = bessel_zero(s, k);
            out.push_back({j * j, n, k});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.n != b.n) return a.n < b.n;
        return a.k < b.k;
    });
    return out;
}

}  // namespace sectorlab
