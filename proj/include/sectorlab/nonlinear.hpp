#pragma once

// Semilinear solvers: damped Newton for the mixed boundary-value problem,
// Nehari-constrained descent for ground states, and the half-disc to
// sector rescaling.
//
// Discrete problem on the free nodes F (Dirichlet rows D carry g):
//   R(u) = (A u)_F - M f(r, u_F) = 0,
// with A the full-node stiffness, so the Dirichlet lift is A_FD g.
// Residual norms are sqrt(R^T M^{-1} R), the L^2 norm of the strong
// residual.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sectorlab/discretization.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/grid.hpp"
#include "sectorlab/sparse.hpp"
#include "sectorlab/spectral.hpp"

namespace sectorlab {

/// f(r, u) = weight(r) * |u|^{p-1} u, or lambda * u for the linear case.
struct Nonlinearity {
    enum class Kind { Linear, Henon, LaneEmden, PowerWithWeight };
    Kind kind = Kind::Linear;
    double lambda = 0.0;
    double weight_exp = 0.0;
    double p = 1.0;

    static Nonlinearity linear(double lambda) { return {Kind::Linear, lambda, 0.0, 1.0}; }
    static Nonlinearity henon(double alpha, double p) { return checked({Kind::Henon, 0.0, alpha, p}); }
    static Nonlinearity lane_emden(double p) { return checked({Kind::LaneEmden, 0.0, 0.0, p}); }
    static Nonlinearity power_with_weight(double w, double p) { return checked({Kind::PowerWithWeight, 0.0, w, p}); }

    bool is_linear() const noexcept { return kind == Kind::Linear; }

    double weight(double r) const {
        if (weight_exp == 0.0) return 1.0;
        return std::pow(r, weight_exp);
    }
    double value(double r, double u) const {
        if (is_linear()) return lambda * u;
        return weight(r) * std::pow(std::abs(u), p - 1.0) * u;
    }
    double derivative(double r, double u) const {
        if (is_linear()) return lambda;
        return p * weight(r) * std::pow(std::abs(u), p - 1.0);
    }
    /// Antiderivative in u with F(r, 0) = 0.
    double primitive(double r, double u) const {
        if (is_linear()) return 0.5 * lambda * u * u;
        return weight(r) * std::pow(std::abs(u), p + 1.0) / (p + 1.0);
    }
    NonlinearityDerivative derivative_fn() const {
        return [self = *this](double r, double u) { return self.derivative(r, u); };
    }

    std::string name() const {
        switch (kind) {
            case Kind::Linear: return "linear";
            case Kind::Henon: return "henon";
            case Kind::LaneEmden: return "lane_emden";
            case Kind::PowerWithWeight: return "power_with_weight";
        }
        return "unknown";
    }

private:
    static Nonlinearity checked(Nonlinearity n) {
        if (!(n.p > 1.0) || !std::isfinite(n.p)) throw DomainError("power nonlinearity needs finite p > 1");
        if (!std::isfinite(n.weight_exp)) throw DomainError("weight exponent must be finite");
        return n;
    }
};

struct ProblemSpec {
    TensorGrid grid;
    Nonlinearity f;
    std::function<double(double r)> g = [](double) { return 0.0; };  // data on the Dirichlet rows
    bool homogeneous = true;  // g identically zero
};

struct SolutionRecord {
    ScalarField field;
    double residual_norm = std::numeric_limits<double>::infinity();
    double energy = 0.0;
    std::optional<MorseReport> morse;
    std::string solver;
    std::string provenance;
    int iterations = 0;
    std::vector<double> trace;
    // Multistart bookkeeping (ground_state only).
    std::vector<double> start_energies;
    std::size_t winner = 0;
    double radial_energy = std::numeric_limits<double>::quiet_NaN();  // best theta-constant competitor
};

/// Assembled pieces shared by the solvers.
struct ProblemSystem {
    LaplacianSystem lap;
    std::vector<double> node_r;  // radial coordinate of each free node

    explicit ProblemSystem(const TensorGrid& g) : lap(assemble_laplacian(g, SpaceTag::mixed())) {
        node_r.resize(lap.map.size());
        for (std::size_t f = 0; f < lap.map.size(); ++f) node_r[f] = g.r(lap.map.free_to_node[f] / g.n_theta());
    }
    std::size_t size() const noexcept { return lap.map.size(); }
};

/// Field with the Dirichlet rows overwritten by g.
inline ScalarField apply_boundary(const ProblemSpec& spec, ScalarField u) {
    const TensorGrid& g = spec.grid;
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        if (!g.dirichlet_row(i)) continue;
        const double val = spec.g(g.r(i));
        for (std::size_t j = 0; j < g.n_theta(); ++j) u(i, j) = val;
    }
    return u;
}

/// R(u) on the free nodes.
inline std::vector<double> residual_vector(const ProblemSpec& spec, const ProblemSystem& sys, const ScalarField& u) {
    const auto au = sys.lap.full_stiffness.multiply(u.values);
    std::vector<double> r(sys.size());
    for (std::size_t f = 0; f < sys.size(); ++f) {
        const std::size_t node = sys.lap.map.free_to_node[f];
        r[f] = au[node] - sys.lap.mass[f] * spec.f.value(sys.node_r[f], u.values[node]);
    }
    return r;
}

inline double residual_norm(const ProblemSpec& spec, const ScalarField& u) {
    const ProblemSystem sys(spec.grid);
    return inverse_mass_norm(residual_vector(spec, sys, u), sys.lap.mass);
}

/// E(u) = 1/2 u_F^T A_FF u_F + u_F^T A_FD g - sum_F M F(r, u).
inline double energy(const ProblemSpec& spec, const ScalarField& u) {
    if (!u.grid.same_shape(spec.grid)) throw DomainError("energy: field lives on a different grid");
    const ProblemSystem sys(spec.grid);
    const ScalarField ub = apply_boundary(spec, u);
    const auto au = sys.lap.full_stiffness.multiply(ub.values);
    // For free rows, (A u)_F = A_FF u_F + A_FD g, so
    // u_F^T (A u)_F - 1/2 u_F^T A_FF u_F gives the split form.
    const auto uf = restrict_to_free(ub, sys.lap.map);
    const auto aff = sys.lap.stiffness.multiply(uf);
    double e = 0.0;
    for (std::size_t f = 0; f < sys.size(); ++f) {
        const std::size_t node = sys.lap.map.free_to_node[f];
        e += uf[f] * au[node] - 0.5 * uf[f] * aff[f];
        e -= sys.lap.mass[f] * spec.f.primitive(sys.node_r[f], uf[f]);
    }
    return e;
}

struct NewtonOptions {
    double tol = 1e-9;
    int max_iterations = 50;
};

inline SolutionRecord newton_solve(const ProblemSpec& spec, const ScalarField& initial, const NewtonOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw DomainError("newton_solve: tol must be positive");
    if (!initial.grid.same_shape(spec.grid)) throw DomainError("newton_solve: initial field lives on a different grid");
    if (!initial.all_finite()) throw DomainError("newton_solve: initial field has non-finite values");
    const ProblemSystem sys(spec.grid);
    const auto& mass = sys.lap.mass;
    const auto& map = sys.lap.map;

    ScalarField u = apply_boundary(spec, initial);
    std::vector<double> res = residual_vector(spec, sys, u);
    double nrm = inverse_mass_norm(res, mass);
    std::vector<double> trace{nrm};
    int it = 0;
    while (nrm > opt.tol) {
        if (it >= opt.max_iterations) {
            throw ConvergenceError("newton_solve: no convergence in " + std::to_string(opt.max_iterations) +
                                       " iterations (residual " + std::to_string(nrm) + ")",
                                   nrm, trace);
        }
        ++it;
        std::vector<double> d(sys.size());
        for (std::size_t f = 0; f < sys.size(); ++f) {
            d[f] = -mass[f] * spec.f.derivative(sys.node_r[f], u.values[map.free_to_node[f]]);
        }
        const BandLU lu = BandLU::factor(sys.lap.stiffness.plus_diagonal(d));
        std::vector<double> step = lu.solve(res);
        double scale = 1.0;
        for (double v : u.values) scale = std::max(scale, std::abs(v));
        double step_max = 0.0;
        for (double v : step) step_max = std::max(step_max, std::abs(v));

        const double phi0 = 0.5 * nrm * nrm;
        double t = 1.0;
        bool accepted = false;
        ScalarField trial = u;
        std::vector<double> trial_res;
        double trial_nrm = nrm;
        for (int halving = 0; halving <= 30; ++halving) {
            if (t * step_max < 1e-14 * scale) break;
            trial = u;
            for (std::size_t f = 0; f < sys.size(); ++f) trial.values[map.free_to_node[f]] -= t * step[f];
            trial_res = residual_vector(spec, sys, trial);
            trial_nrm = inverse_mass_norm(trial_res, mass);
            if (std::isfinite(trial_nrm) && 0.5 * trial_nrm * trial_nrm <= (1.0 - 2e-4 * t) * phi0) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            throw ConvergenceError("newton_solve: stagnated at iteration " + std::to_string(it) + " (residual " +
                                       std::to_string(nrm) + ")",
                                   nrm, trace);
        }
        u = std::move(trial);
        res = std::move(trial_res);
        nrm = trial_nrm;
        trace.push_back(nrm);
    }

    // Re-verify with an independent assembly.
    const double check = residual_norm(spec, u);
    if (!(check <= std::max(opt.tol, 2.0 * nrm))) {
        throw ConvergenceError("newton_solve: re-verification failed (" + std::to_string(check) + ")", check, trace);
    }
    SolutionRecord rec;
    rec.field = std::move(u);
    rec.residual_norm = check;
    rec.energy = energy(spec, rec.field);
    rec.solver = "newton";
    rec.iterations = it;
    rec.trace = std::move(trace);
    return rec;
}

struct GroundStateOptions {
    double grad_tol = 1e-6;      // relative A-norm of the Sobolev gradient
    double newton_tol = 1e-9;    // absolute residual after the Newton polish
    int max_iterations = 3000;
    double bias = 0.9;           // amplitude of the angular bias in the seeds
    std::size_t seeds = 3;       // 1: radial only, 2: + biased, 3: + mirrored
};

namespace detail {

/// Radial profile vanishing on the Dirichlet rows.
inline double bump_profile(const TensorGrid& g, double r) {
    if (!g.is_polar()) {
        const double w = g.rect_domain().width;
        return std::sin(std::numbers::pi * r / w);
    }
    const auto& d = g.sector_domain();
    if (d.is_disc()) return std::cos(0.5 * std::numbers::pi * r / d.r_outer);
    return std::sin(std::numbers::pi * (r - d.r_inner) / (d.r_outer - d.r_inner));
}

inline void average_rows(const TensorGrid& g, std::vector<double>& uf, const FreeNodeMap& map) {
    // Free nodes of the mixed space are whole rows.
    std::vector<double> sum(g.n_r(), 0.0);
    std::vector<double> wsum(g.n_r(), 0.0);
    for (std::size_t f = 0; f < map.size(); ++f) {
        const std::size_t node = map.free_to_node[f];
        const std::size_t i = node / g.n_theta();
        const double w = g.column_weight(node % g.n_theta());
        sum[i] += w * uf[f];
        wsum[i] += w;
    }
    for (std::size_t f = 0; f < map.size(); ++f) {
        const std::size_t i = map.free_to_node[f] / g.n_theta();
        uf[f] = sum[i] / wsum[i];
    }
}

struct NehariState {
    std::vector<double> u;
    double quad = 0.0;    // u^T A u
    double energy = 0.0;  // (1/2 - 1/(p+1)) quad on the manifold
};

}  // namespace detail

/// Least-energy solution on the Nehari manifold by multistart Sobolev
/// gradient descent, each start finished by a Newton polish.
inline SolutionRecord ground_state(const ProblemSpec& spec, const GroundStateOptions& opt = {}) {
    if (spec.f.is_linear()) throw DomainError("ground_state needs a superlinear nonlinearity");
    if (!spec.homogeneous) throw DomainError("ground_state needs homogeneous Dirichlet data");
    if (opt.seeds < 1 || opt.seeds > 3) throw DomainError("ground_state: seeds must be 1, 2 or 3");
    const TensorGrid& g = spec.grid;
    const ProblemSystem sys(g);
    const auto& a = sys.lap.stiffness;
    const auto& mass = sys.lap.mass;
    const auto& map = sys.lap.map;
    const std::size_t n = sys.size();
    const double p = spec.f.p;
    const auto chol = EnvelopeCholesky::factor(a, rcm_ordering(a));
    if (!chol) throw ConvergenceError("ground_state: stiffness is not positive definite", 0.0);

    std::vector<double> aw(n);
    std::vector<double> wf(n);
    for (std::size_t f = 0; f < n; ++f) aw[f] = mass[f] * spec.f.weight(sys.node_r[f]);

    auto dot = [](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
        return s;
    };
    auto project = [&](std::vector<double> u) -> std::optional<detail::NehariState> {
        const auto au = a.multiply(u);
        const double q = dot(u, au);
        double pw = 0.0;
        for (std::size_t f = 0; f < n; ++f) pw += aw[f] * std::pow(std::abs(u[f]), p + 1.0);
        if (!(q > 0.0) || !(pw > 0.0) || !std::isfinite(q) || !std::isfinite(pw)) return std::nullopt;
        const double s = std::pow(q / pw, 1.0 / (p - 1.0));
        for (double& v : u) v *= s;
        const double qs = q * s * s;
        return detail::NehariState{std::move(u), qs, (0.5 - 1.0 / (p + 1.0)) * qs};
    };

    std::vector<double> start_energies;
    double radial_energy = std::numeric_limits<double>::quiet_NaN();
    std::vector<SolutionRecord> records;
    std::vector<std::string> failures;
    for (std::size_t seed = 0; seed < opt.seeds; ++seed) {
        const bool radial = seed == 0;
        const double sign = seed == 2 ? -1.0 : 1.0;
        std::vector<double> u0(n);
        for (std::size_t f = 0; f < n; ++f) {
            const std::size_t node = map.free_to_node[f];
            const double r = g.r(node / g.n_theta());
            const double th = g.theta(node % g.n_theta());
            const double bias = radial ? 0.0 : sign * opt.bias * std::cos(std::numbers::pi * th / g.beta());
            u0[f] = detail::bump_profile(g, r) * (1.0 + bias);
        }
        auto state = project(std::move(u0));
        if (!state) {
            failures.push_back("start " + std::to_string(seed) + ": degenerate seed");
            continue;
        }
        double t = 1.0;
        double grad_rel = std::numeric_limits<double>::infinity();
        int it = 0;
        std::vector<double> trace;
        for (; it < opt.max_iterations; ++it) {
            for (std::size_t f = 0; f < n; ++f) wf[f] = mass[f] * spec.f.value(sys.node_r[f], state->u[f]);
            const auto z = chol->solve(wf);
            std::vector<double> grad(n);
            for (std::size_t f = 0; f < n; ++f) grad[f] = state->u[f] - z[f];
            // ||grad||_A^2 = grad^T A grad = grad^T (A u - M f)
            const auto ag = a.multiply(grad);
            const double gnorm2 = std::max(dot(grad, ag), 0.0);
            grad_rel = std::sqrt(gnorm2 / state->quad);
            trace.push_back(grad_rel);
            if (grad_rel <= opt.grad_tol) break;
            bool moved = false;
            for (int halving = 0; halving < 40; ++halving) {
                std::vector<double> cand(n);
                for (std::size_t f = 0; f < n; ++f) cand[f] = state->u[f] - t * grad[f];
                if (radial) detail::average_rows(g, cand, map);
                auto next = project(std::move(cand));
                if (next && next->energy <= state->energy - 1e-4 * t * gnorm2) {
                    state = std::move(next);
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) break;
            t = std::min(1.0, 2.0 * t);
        }
        if (!(grad_rel <= opt.grad_tol) && grad_rel > 1e3 * opt.grad_tol) {
            failures.push_back("start " + std::to_string(seed) + ": gradient " + std::to_string(grad_rel) +
                               " after " + std::to_string(it) + " iterations");
            continue;
        }
        ScalarField guess = prolong(state->u, map, g);
        try {
            SolutionRecord rec = newton_solve(spec, guess, {opt.newton_tol, 30});
            if (radial) {
                // Symmetrize the polished radial state; Newton preserves it up to roundoff.
                auto uf = restrict_to_free(rec.field, map);
                detail::average_rows(g, uf, map);
                rec.field = prolong(uf, map, g);
                rec.residual_norm = residual_norm(spec, rec.field);
                rec.energy = energy(spec, rec.field);
            }
            rec.iterations += it;
            rec.trace.insert(rec.trace.begin(), trace.begin(), trace.end());
            if (radial) radial_energy = rec.energy;
            start_energies.push_back(rec.energy);
            records.push_back(std::move(rec));
        } catch (const ConvergenceError& e) {
            failures.push_back("start " + std::to_string(seed) + ": " + e.what());
        }
    }
    if (records.empty()) {
        std::string msg = "ground_state: every start failed";
        for (const auto& s : failures) msg += "; " + s;
        throw ConvergenceError(msg, std::numeric_limits<double>::infinity());
    }
    // Zero-energy (trivial) limits never win.
    std::size_t best = records.size();
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].field.max_abs() == 0.0) continue;
        if (best == records.size()) {
            best = k;
            continue;
        }
        const double tie = 1e-9 * std::abs(records[best].energy);
        if (records[k].energy < records[best].energy - tie) best = k;
    }
    if (best == records.size()) throw ConvergenceError("ground_state: all starts collapsed to zero", 0.0);
    SolutionRecord out = std::move(records[best]);
    out.solver = "ground_state";
    out.start_energies = start_energies;
    out.winner = best;
    out.radial_energy = radial_energy;
    return out;
}

struct RescaleResult {
    SolutionRecord record;
    double scale = 1.0;            // c = (pi/beta)^{2/(p-1)}
    double target_weight_exp = 0.0;
    double residual_strong = 0.0;  // M^{-1} norm
    double residual_dual = 0.0;    // A^{-1} (H^{-1}) norm
    bool too_fine = false;         // target resolves more than the source data
};

namespace detail {

/// Bilinear interpolation of a disc-sector field at (r, theta); rows below
/// the first node are extrapolated linearly.
inline double interpolate_polar(const ScalarField& u, double r, double theta) {
    const TensorGrid& g = u.grid;
    const double x = (r - g.r(0)) / g.h_r();
    const double y = theta / g.h_theta();
    auto i0 = static_cast<long>(std::floor(x));
    auto j0 = static_cast<long>(std::floor(y));
    i0 = std::clamp(i0, 0L, static_cast<long>(g.n_r()) - 2);
    j0 = std::clamp(j0, 0L, static_cast<long>(g.n_theta()) - 2);
    const double tx = x - static_cast<double>(i0);
    const double ty = std::clamp(y - static_cast<double>(j0), 0.0, 1.0);
    const auto i = static_cast<std::size_t>(i0);
    const auto j = static_cast<std::size_t>(j0);
    const double lo = (1.0 - ty) * u(i, j) + ty * u(i, j + 1);
    const double hi = (1.0 - ty) * u(i + 1, j) + ty * u(i + 1, j + 1);
    return (1.0 - tx) * lo + tx * hi;
}

}  // namespace detail

/// Transplants a half-disc solution of the weighted problem to the sector of
/// opening beta: v(rho, phi) = c u(rho^{pi/beta}, (pi/beta) phi).
inline RescaleResult sector_rescale(const SolutionRecord& source, double beta, double p, double alpha_exp,
                                    std::size_t n_r, std::size_t n_theta) {
    const TensorGrid& sg = source.field.grid;
    if (!sg.is_polar() || !sg.sector_domain().is_disc() || std::abs(sg.beta() - std::numbers::pi) > 1e-12 ||
        std::abs(sg.sector_domain().r_outer - 1.0) > 1e-12) {
        throw DomainError("sector_rescale: source must live on the unit half-disc");
    }
    if (!(p > 1.0)) throw DomainError("sector_rescale: p must exceed 1");
    const TensorGrid tg = TensorGrid::sector(SectorDomain::make(0.0, 1.0, beta), n_r, n_theta);
    const double s = std::numbers::pi / beta;
    RescaleResult out;
    out.scale = std::pow(s, 2.0 / (p - 1.0));
    out.target_weight_exp = (alpha_exp + 2.0) * s - 2.0;
    out.too_fine = n_r > sg.n_r() || n_theta > sg.n_theta();

    ScalarField v(tg);
    for (std::size_t i = 0; i < tg.n_r(); ++i) {
        const double r = std::pow(tg.r(i), s);
        for (std::size_t j = 0; j < tg.n_theta(); ++j) {
            v(i, j) = out.scale * detail::interpolate_polar(source.field, r, s * tg.theta(j));
        }
    }
    const std::size_t last = tg.n_r() - 1;
    for (std::size_t j = 0; j < tg.n_theta(); ++j) v(last, j) = 0.0;

    ProblemSpec target{tg, Nonlinearity::power_with_weight(out.target_weight_exp, p)};
    const ProblemSystem sys(tg);
    const auto res = residual_vector(target, sys, v);
    out.residual_strong = inverse_mass_norm(res, sys.lap.mass);
    const auto chol = EnvelopeCholesky::factor(sys.lap.stiffness, rcm_ordering(sys.lap.stiffness));
    if (!chol) throw ConvergenceError("sector_rescale: stiffness is not positive definite", 0.0);
    const auto z = chol->solve(res);
    double dual = 0.0;
    for (std::size_t f = 0; f < res.size(); ++f) dual += res[f] * z[f];
    out.residual_dual = std::sqrt(std::max(dual, 0.0));

    out.record.field = std::move(v);
    out.record.residual_norm = out.residual_strong;
    out.record.energy = energy(target, out.record.field);
    out.record.solver = "sector_rescale";
    out.record.provenance = source.provenance;
    return out;
}

}  // namespace sectorlab
