#pragma once

// Angular symmetry diagnostics: rotating-plane sweep, the u_theta identity
// for the linearized operator, and the three-way verdict (theta-constant,
// strictly monotone, inconsistent).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sectorlab/discretization.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/grid.hpp"
#include "sectorlab/nonlinear.hpp"
#include "sectorlab/spectral.hpp"

namespace sectorlab {

struct RotatingPlaneReport {
    std::vector<double> alphas;            // strictly increasing, grid aligned
    std::vector<long> half_steps;          // alpha = half_steps * h_theta / 2
    std::vector<double> min_w;             // over the columns with theta < alpha
    std::vector<double> boundary_min;      // over the theta = 0 column
};

/// w(i, j) = u(i, 2 alpha - theta_j) - u(i, j) on every column, with alpha =
/// m h_theta / 2 and values beyond the edges taken from the even extension.
inline ScalarField difference_function(const ScalarField& u, long m) {
    const TensorGrid& g = u.grid;
    const long top = 2 * (static_cast<long>(g.n_theta()) - 1);
    if (m <= 0 || m >= top) throw DomainError("difference_function: alpha must lie strictly inside (0, beta)");
    ScalarField w(g);
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const std::size_t src = fold_column(m - static_cast<long>(j), g.n_theta());
            w(i, j) = u(i, src) - u(i, j);
        }
    }
    return w;
}

inline RotatingPlaneReport rotating_plane(const ScalarField& u, std::size_t n_alpha) {
    const TensorGrid& g = u.grid;
    const long top = 2 * (static_cast<long>(g.n_theta()) - 1);
    if (n_alpha < 3) throw DomainError("rotating_plane: n_alpha must be at least 3");
    if (static_cast<long>(n_alpha) > top - 1) {
        throw DomainError("rotating_plane: n_alpha exceeds the " + std::to_string(top - 1) + " grid-aligned angles");
    }
    RotatingPlaneReport rep;
    for (std::size_t k = 1; k <= n_alpha; ++k) {
        const long m = std::lround(static_cast<double>(k) * static_cast<double>(top) / static_cast<double>(n_alpha + 1));
        if (!rep.half_steps.empty() && m <= rep.half_steps.back()) continue;
        if (m <= 0 || m >= top) continue;
        rep.half_steps.push_back(m);
    }
    for (long m : rep.half_steps) {
        const ScalarField w = difference_function(u, m);
        double lo = std::numeric_limits<double>::infinity();
        double blo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.n_r(); ++i) {
            if (g.dirichlet_row(i)) continue;
            for (std::size_t j = 0; 2 * static_cast<long>(j) < m && j < g.n_theta(); ++j) lo = std::min(lo, w(i, j));
            blo = std::min(blo, w(i, 0));
        }
        rep.alphas.push_back(0.5 * static_cast<double>(m) * g.h_theta());
        rep.min_w.push_back(lo);
        rep.boundary_min.push_back(blo);
    }
    return rep;
}

struct UthetaCheck {
    double residual = 0.0;      // ||L_u u_theta||_{M^{-1}} on the H1_0 free set
    double utheta_norm = 0.0;   // ||u_theta||_M
};

inline UthetaCheck verify_utheta_equation(const ScalarField& u, const Nonlinearity& f) {
    const OperatorSet ops = assemble_linearized(u, f.derivative_fn(), SpaceTag::dirichlet());
    const auto x = restrict_to_free(theta_derivative(u), ops.map);
    const auto y = ops.apply(x);
    return {inverse_mass_norm(y, ops.mass), mass_norm(x, ops.mass)};
}

/// ||u - row average||_M^2 / ||u||_M^2 over the grid: 0 for theta-constant
/// fields, near 1 for purely angular modes.
inline double angular_content(const ScalarField& u) {
    const TensorGrid& g = u.grid;
    double total = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        double s = 0.0;
        double ws = 0.0;
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            s += g.column_weight(j) * u(i, j);
            ws += g.column_weight(j);
        }
        const double mean = s / ws;
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const double a = g.cell_area(i, j);
            total += a * u(i, j) * u(i, j);
            dev += a * (u(i, j) - mean) * (u(i, j) - mean);
        }
    }
    return total > 0.0 ? dev / total : 0.0;
}

inline bool is_radial_mode(const ScalarField& u, double tol = 1e-3) { return angular_content(u) < tol; }

enum class Verdict { ThetaConstant, StrictlyMonotone, Inconsistent };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ThetaConstant: return "ThetaConstant";
        case Verdict::StrictlyMonotone: return "StrictlyMonotone";
        case Verdict::Inconsistent: return "Inconsistent";
    }
    return "Unknown";
}

struct ClassifyOptions {
    double c_const = 10.0;
    double alignment_threshold = 0.99;
    double eig_tol = 1e-8;
    std::size_t gamma_count = 3;
    std::optional<double> zero_tol;  // default_zero_tol of the mixed operator when unset
};

struct ClassificationReport {
    Verdict verdict = Verdict::Inconsistent;
    int direction = 0;  // +1 increasing, -1 decreasing in theta (StrictlyMonotone only)
    double utheta_min = 0.0;
    double utheta_max = 0.0;
    double utheta_sup = 0.0;
    double threshold = 0.0;  // c_const h^2 ||u||_inf
    std::vector<double> lambda_gamma;
    double lambda1_gamma = 0.0;
    double lambda2_gamma = 0.0;
    double lambda1_dirichlet = 0.0;
    double utheta_alignment = 0.0;
    double zero_tol = 0.0;
    MorseReport morse;
    bool near_degenerate = false;  // |lambda_2 - lambda_3| < zero_tol in H1_gamma
    bool borderline = false;       // a test sits within a factor 2 of its threshold
    std::vector<std::string> implications;
};

inline ClassificationReport classify(const ScalarField& u, const Nonlinearity& f, const ClassifyOptions& opt = {}) {
    if (!u.all_finite()) throw DomainError("classify: field has non-finite values");
    const TensorGrid& g = u.grid;
    ClassificationReport rep;
    const double h = g.h();
    rep.threshold = opt.c_const * h * h * u.max_abs();

    const ScalarField ut = theta_derivative(u);
    rep.utheta_min = std::numeric_limits<double>::infinity();
    rep.utheta_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        if (g.dirichlet_row(i)) continue;
        for (std::size_t j = 1; j + 1 < g.n_theta(); ++j) {
            rep.utheta_min = std::min(rep.utheta_min, ut(i, j));
            rep.utheta_max = std::max(rep.utheta_max, ut(i, j));
        }
    }
    rep.utheta_sup = std::max(std::abs(rep.utheta_min), std::abs(rep.utheta_max));

    const auto potential = linearization_potential(u, f.derivative_fn());
    const OperatorSet mixed = assemble_operator(g, SpaceTag::mixed(), potential);
    const OperatorSet dir = assemble_operator(g, SpaceTag::dirichlet(), potential);
    const std::size_t count = std::min(opt.gamma_count, mixed.size());
    const Spectrum sg = smallest_eigenpairs(mixed, count, opt.eig_tol);
    const Spectrum sd = smallest_eigenpairs(dir, 1, opt.eig_tol);
    rep.zero_tol = opt.zero_tol ? *opt.zero_tol : default_zero_tol(mixed);
    rep.lambda_gamma = sg.eigenvalues;
    rep.lambda1_gamma = sg.eigenvalues[0];
    rep.lambda2_gamma = sg.eigenvalues.size() > 1 ? sg.eigenvalues[1] : std::numeric_limits<double>::quiet_NaN();
    rep.lambda1_dirichlet = sd.eigenvalues[0];
    rep.morse = morse_index(sg, rep.zero_tol);
    rep.near_degenerate = sg.eigenvalues.size() > 2 && std::abs(sg.eigenvalues[2] - sg.eigenvalues[1]) < rep.zero_tol;

    const auto x = restrict_to_free(ut, dir.map);
    const double xn = mass_norm(x, dir.mass);
    if (xn > 0.0) {
        const auto e = restrict_to_free(sd.eigenvectors[0], dir.map);
        double ip = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) ip += dir.mass[k] * x[k] * e[k];
        ip /= xn;
        rep.utheta_alignment = ip * ip;
    }

    const double thr = rep.threshold;
    const bool constant = rep.utheta_sup <= thr;
    const bool increasing = rep.utheta_min >= -thr;
    const bool decreasing = rep.utheta_max <= thr;
    const bool zero_dir = std::abs(rep.lambda1_dirichlet) <= rep.zero_tol;
    const bool aligned = rep.utheta_alignment >= opt.alignment_threshold;

    if (constant) {
        rep.verdict = Verdict::ThetaConstant;
        rep.borderline = rep.utheta_sup > 0.5 * thr;
    } else if ((increasing || decreasing) && zero_dir && aligned) {
        rep.verdict = Verdict::StrictlyMonotone;
        rep.direction = increasing ? 1 : -1;
        rep.borderline = rep.utheta_sup < 2.0 * thr || std::abs(rep.lambda1_dirichlet) > 0.5 * rep.zero_tol;
    } else {
        rep.verdict = Verdict::Inconsistent;
        if (!(increasing || decreasing)) rep.implications.emplace_back("u_theta changes sign: u is not monotone in theta");
        if ((increasing || decreasing) && !zero_dir) {
            rep.implications.emplace_back("lambda_1(H1_0) is not zero although u_theta is one-signed");
        }
        if ((increasing || decreasing) && !aligned) {
            rep.implications.emplace_back("u_theta is not aligned with the first H1_0 eigenfunction");
        }
        rep.implications.emplace_back("Morse index in H1_gamma expected >= 2 (measured " +
                                      std::to_string(rep.morse.index) + ")");
    }
    if (rep.morse.index > 1 && rep.verdict != Verdict::Inconsistent) {
        rep.implications.emplace_back("verdict holds although the Morse index exceeds 1");
    }
    return rep;
}

}  // namespace sectorlab
