#pragma once

// Subcommand bodies shared by the command-line tool and the tests. Each
// command writes its artifacts plus config.txt and manifest.txt under
// output.dir and returns 0 iff every requested stage met its tolerance.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sectorlab/analysis.hpp"
#include "sectorlab/config.hpp"
#include "sectorlab/discretization.hpp"
#include "sectorlab/io.hpp"
#include "sectorlab/manifest.hpp"
#include "sectorlab/nonlinear.hpp"
#include "sectorlab/special_functions.hpp"
#include "sectorlab/spectral.hpp"
#include "sectorlab/svg.hpp"

namespace sectorlab {

struct CommandResult {
    int exit_code = 0;
    std::string manifest;
};

inline TensorGrid grid_from_config(const RunConfig& cfg) {
    const std::string& shape = cfg.str("domain.shape");
    const std::size_t n_r = cfg.count("domain.n_r");
    const std::size_t n_theta = cfg.count("domain.n_theta");
    if (shape == "sector") {
        return TensorGrid::sector(
            SectorDomain::make(cfg.number("domain.r_inner"), cfg.number("domain.r_outer"), cfg.number("domain.beta")),
            n_r, n_theta);
    }
    if (shape == "rectangle") {
        return TensorGrid::rectangle(RectDomain::make(cfg.number("domain.beta"), cfg.number("domain.width")), n_r,
                                     n_theta);
    }
    throw FormatError("domain.shape must be sector or rectangle");
}

/// k-th (1-based) eigenpair of the mixed Laplacian on the grid.
inline std::pair<double, ScalarField> laplacian_eigenpair(const TensorGrid& g, std::size_t k, double tol) {
    const OperatorSet ops = assemble_operator(g, SpaceTag::mixed(), 0.0);
    Spectrum s = smallest_eigenpairs(ops, k, tol);
    return {s.eigenvalues[k - 1], std::move(s.eigenvectors[k - 1])};
}

inline constexpr double kEigenRefTol = 1e-10;

inline Nonlinearity nonlinearity_from_config(const RunConfig& cfg, const TensorGrid& g) {
    const std::string& kind = cfg.str("problem.kind");
    if (kind == "linear") {
        const std::string& lam = cfg.str("problem.lambda");
        if (const auto k = parse_eigen_ref(lam)) return Nonlinearity::linear(laplacian_eigenpair(g, *k, kEigenRefTol).first);
        return Nonlinearity::linear(cfg.number("problem.lambda"));
    }
    if (kind == "henon") return Nonlinearity::henon(cfg.number("problem.alpha"), cfg.number("problem.p"));
    if (kind == "lane_emden") return Nonlinearity::lane_emden(cfg.number("problem.p"));
    if (kind == "power") return Nonlinearity::power_with_weight(cfg.number("problem.weight_exp"), cfg.number("problem.p"));
    throw FormatError("problem.kind must be linear, henon, lane_emden or power");
}

inline SpaceTag space_from_config(const RunConfig& cfg) {
    const std::string& s = cfg.str("spectrum.space");
    if (s == "mixed") return SpaceTag::mixed();
    if (s == "dirichlet") return SpaceTag::dirichlet();
    throw FormatError("spectrum.space must be mixed or dirichlet");
}

inline std::optional<double> zero_tol_from_config(const RunConfig& cfg) {
    if (cfg.str("spectrum.zero_tol") == "auto") return std::nullopt;
    return cfg.number("spectrum.zero_tol");
}

inline std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.canonical_text()).substr(0, 16); }

namespace detail {

inline ArtifactWriter open_output(const RunConfig& cfg) {
    ArtifactWriter w(cfg.str("output.dir"));
    w.write("config.txt", cfg.canonical_text());
    return w;
}

inline void check_field_grid(const ScalarField& u, const TensorGrid& g, const char* what) {
    if (!u.grid.same_shape(g)) {
        throw FormatError(std::string(what) + " does not match the configured grid (domain.* keys)");
    }
}

inline std::vector<double> potential_at(const Nonlinearity& f, const ScalarField& u) {
    return linearization_potential(u, f.derivative_fn());
}

}  // namespace detail

/// Zeros j_{nu,k} as CSV "nu,k,zero" (k = k_first..k_last for every nu).
inline int cmd_bessel(const std::vector<double>& nus, int k_first, int k_last, std::ostream& out,
                      const std::optional<std::string>& out_dir = std::nullopt) {
    CsvTable t({"nu", "k", "zero"});
    for (double nu : nus) {
        for (int k = k_first; k <= k_last; ++k) {
            t.add_row({format_double(nu), std::to_string(k), format_double(bessel_zero(nu, k))});
        }
    }
    out << t.text();
    if (out_dir) {
        ArtifactWriter w(*out_dir);
        w.write("bessel.csv", t.text());
        w.finish();
    }
    return 0;
}

/// Opening beta with j_{pi/beta,1} = target (default j_{0,2}).
inline int cmd_critical_angle(std::optional<double> target, std::ostream& out,
                              const std::optional<std::string>& out_dir = std::nullopt) {
    const double c = target ? *target : bessel_zero(0.0, 2);
    const double beta = critical_angle(c);
    KeyValues kv;
    kv.set("target", c);
    kv.set("beta", beta);
    kv.set("order", std::numbers::pi / beta);
    out << kv.text();
    if (out_dir) {
        ArtifactWriter w(*out_dir);
        w.write("critical_angle.txt", kv.text());
        w.finish();
    }
    return 0;
}

inline CommandResult cmd_spectrum(const RunConfig& cfg, const std::optional<std::string>& field_path,
                                  std::ostream& log) {
    const TensorGrid g = grid_from_config(cfg);
    const Nonlinearity f = nonlinearity_from_config(cfg, g);
    ScalarField u(g);
    if (field_path) {
        u = read_field_file(*field_path);
        detail::check_field_grid(u, g, "field");
    }
    const SpaceTag space = space_from_config(cfg);
    const OperatorSet ops = assemble_operator(g, space, detail::potential_at(f, u));
    const std::size_t m = cfg.count("spectrum.count");
    const double tol = cfg.number("spectrum.tol");
    const Spectrum s = smallest_eigenpairs(ops, m, tol);
    const double zt = zero_tol_from_config(cfg).value_or(default_zero_tol(ops));
    const MorseReport mr = morse_index(s, zt);

    ArtifactWriter w = detail::open_output(cfg);
    CsvTable csv({"index", "eigenvalue", "residual"});
    CsvTable modes({"index", "angular_content", "kind"});
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        csv.add_row({std::to_string(k + 1), format_double(s.eigenvalues[k]), format_double(s.residuals[k])});
        const double ac = angular_content(s.eigenvectors[k]);
        modes.add_row({std::to_string(k + 1), format_double(ac), ac < 1e-3 ? "radial" : "angular"});
        w.write("eigenvector_" + std::to_string(k + 1) + ".field", write_field_text(s.eigenvectors[k]));
    }
    w.write("spectrum.csv", csv.text());
    w.write("modes.csv", modes.text());
    KeyValues rep;
    rep.set("space", s.space.name());
    rep.set("morse_index", mr.index);
    rep.set("zero_modes", mr.zero_modes);
    rep.set("zero_tol", mr.zero_tol);
    rep.set("possibly_undercounted", mr.possibly_undercounted);
    std::string pairs;
    const double h = g.h();
    for (const auto& [a, b] : near_degenerate_pairs(s, zt, 10.0 * h * h)) {
        if (!pairs.empty()) pairs += ';';
        pairs += std::to_string(a + 1) + '/' + std::to_string(b + 1);
    }
    rep.set("near_degenerate", pairs.empty() ? std::string("none") : pairs);
    rep.set("iterations", s.iterations);
    w.write("morse.txt", rep.text());
    CommandResult res{0, w.finish()};
    log << csv.text() << rep.text();
    return res;
}

inline CommandResult cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const TensorGrid g = grid_from_config(cfg);
    const Nonlinearity f = nonlinearity_from_config(cfg, g);
    const double gval = cfg.number("problem.g");
    ProblemSpec spec{g, f, [gval](double) { return gval; }, gval == 0.0};
    const double tol = cfg.number("solver.tol");
    const std::string& method = cfg.str("solver.method");
    SolutionRecord rec;
    if (method == "newton") {
        const std::string& init = cfg.str("solver.initial");
        ScalarField u0(g);
        if (const auto k = parse_eigen_ref(init)) {
            u0 = laplacian_eigenpair(g, *k, kEigenRefTol).second;
        } else if (init == "bump") {
            u0 = ScalarField::from_function(g, [&](double r, double) { return detail::bump_profile(g, r); });
        } else if (init != "zero") {
            throw FormatError("solver.initial must be bump, zero or eigen:k");
        }
        rec = newton_solve(spec, u0, {tol, static_cast<int>(cfg.count("solver.max_iter"))});
    } else if (method == "ground_state") {
        GroundStateOptions opt;
        opt.grad_tol = cfg.number("solver.grad_tol");
        opt.newton_tol = tol;
        opt.bias = cfg.number("solver.bias");
        opt.seeds = cfg.count("solver.seeds");
        rec = ground_state(spec, opt);
    } else {
        throw FormatError("solver.method must be newton or ground_state");
    }
    rec.provenance = rec.solver + ":" + config_hash(cfg);
    const OperatorSet lin = assemble_operator(g, SpaceTag::mixed(), detail::potential_at(f, rec.field));
    const Spectrum s = smallest_eigenpairs(lin, std::min<std::size_t>(3, lin.size()), cfg.number("spectrum.tol"));
    rec.morse = morse_index(s, zero_tol_from_config(cfg).value_or(default_zero_tol(lin)));

    ArtifactWriter w = detail::open_output(cfg);
    w.write("solution.field", write_field_text(rec.field));
    KeyValues meta;
    meta.set("kind", f.name());
    meta.set("lambda", f.lambda);
    meta.set("weight_exp", f.weight_exp);
    meta.set("p", f.p);
    meta.set("g", gval);
    meta.set("solver", rec.solver);
    meta.set("provenance", rec.provenance);
    meta.set("residual_norm", rec.residual_norm);
    meta.set("energy", rec.energy);
    meta.set("iterations", rec.iterations);
    if (!rec.start_energies.empty()) {
        std::string es;
        for (double e : rec.start_energies) es += (es.empty() ? "" : ";") + format_double(e);
        meta.set("start_energies", es);
        meta.set("winner", rec.winner);
        meta.set("radial_energy", rec.radial_energy);
        meta.set("probe_parameters", "desk-scale values, not taken from the literature");
    }
    meta.set("morse_index", rec.morse->index);
    meta.set("zero_modes", rec.morse->zero_modes);
    meta.set("zero_tol", rec.morse->zero_tol);
    meta.set("max_abs", rec.field.max_abs());
    w.write("solution.meta", meta.text());
    const int code = rec.residual_norm <= tol ? 0 : 1;
    log << meta.text();
    return {code, w.finish()};
}

inline std::string classification_text(const ClassificationReport& r) {
    KeyValues kv;
    kv.set("verdict", to_string(r.verdict));
    kv.set("direction", r.direction);
    kv.set("utheta_min", r.utheta_min);
    kv.set("utheta_max", r.utheta_max);
    kv.set("threshold", r.threshold);
    kv.set("lambda1_gamma", r.lambda1_gamma);
    kv.set("lambda2_gamma", r.lambda2_gamma);
    kv.set("lambda1_dirichlet", r.lambda1_dirichlet);
    kv.set("utheta_alignment", r.utheta_alignment);
    kv.set("zero_tol", r.zero_tol);
    kv.set("morse_index", r.morse.index);
    kv.set("zero_modes", r.morse.zero_modes);
    kv.set("near_degenerate", r.near_degenerate);
    kv.set("borderline", r.borderline);
    std::string imp;
    for (const auto& s : r.implications) imp += (imp.empty() ? "" : "; ") + s;
    kv.set("implications", imp.empty() ? std::string("none") : imp);
    return kv.text();
}

inline CommandResult cmd_classify(const RunConfig& cfg, const std::string& field_path, std::ostream& log) {
    const ScalarField u = read_field_file(field_path);
    const Nonlinearity f = nonlinearity_from_config(cfg, u.grid);
    ClassifyOptions opt;
    opt.zero_tol = zero_tol_from_config(cfg);
    opt.eig_tol = cfg.number("spectrum.tol");
    const ClassificationReport rep = classify(u, f, opt);
    const std::size_t max_alpha = 2 * (u.grid.n_theta() - 1) - 1;
    const RotatingPlaneReport rp = rotating_plane(u, std::min(cfg.count("analysis.n_alpha"), max_alpha));
    const UthetaCheck uc = verify_utheta_equation(u, f);

    ArtifactWriter w = detail::open_output(cfg);
    std::string text = classification_text(rep);
    KeyValues extra;
    extra.set("utheta_equation_residual", uc.residual);
    extra.set("utheta_norm", uc.utheta_norm);
    text += extra.text();
    w.write("classification.txt", text);
    CsvTable sweep({"alpha", "min_w", "boundary_min"});
    for (std::size_t k = 0; k < rp.alphas.size(); ++k) {
        sweep.add_row({format_double(rp.alphas[k]), format_double(rp.min_w[k]), format_double(rp.boundary_min[k])});
    }
    w.write("alpha_sweep.csv", sweep.text());
    if (cfg.flag("output.svg")) w.write("heatmap.svg", heatmap_svg({{"u", u}, {"u_theta", theta_derivative(u)}}));
    log << text;
    return {0, w.finish()};
}

inline CommandResult cmd_rescale(const RunConfig& cfg, const std::string& field_path, std::ostream& log) {
    SolutionRecord src;
    src.field = read_field_file(field_path);
    src.provenance = "file:" + sha256_hex(read_file(field_path)).substr(0, 16);
    const std::size_t n_r = cfg.count("rescale.n_r") ? cfg.count("rescale.n_r") : src.field.grid.n_r();
    const std::size_t n_t = cfg.count("rescale.n_theta") ? cfg.count("rescale.n_theta") : src.field.grid.n_theta();
    const RescaleResult r =
        sector_rescale(src, cfg.number("rescale.beta"), cfg.number("rescale.p"), cfg.number("rescale.alpha"), n_r, n_t);
    ArtifactWriter w = detail::open_output(cfg);
    w.write("rescaled.field", write_field_text(r.record.field));
    KeyValues kv;
    kv.set("scale", r.scale);
    kv.set("target_weight_exp", r.target_weight_exp);
    kv.set("residual_strong", r.residual_strong);
    kv.set("residual_dual", r.residual_dual);
    kv.set("energy", r.record.energy);
    kv.set("target_finer_than_source", r.too_fine);
    w.write("rescale.txt", kv.text());
    log << kv.text();
    return {0, w.finish()};
}

inline CommandResult cmd_splitting(const RunConfig& cfg, const std::optional<std::string>& field_path,
                                   std::ostream& log) {
    const TensorGrid g = grid_from_config(cfg);
    const Nonlinearity f = nonlinearity_from_config(cfg, g);
    ScalarField u(g);
    if (field_path) {
        u = read_field_file(*field_path);
        detail::check_field_grid(u, g, "field");
    }
    const double alpha = cfg.str("splitting.alpha") == "auto" ? 0.5 * g.beta() : cfg.number("splitting.alpha");
    const SplittingCheck c =
        splitting_inequality_check(g, detail::potential_at(f, u), alpha, cfg.number("spectrum.tol"));
    KeyValues kv;
    kv.set("alpha_requested", alpha);
    kv.set("alpha_snapped", c.alpha_snapped);
    kv.set("mismatch", c.mismatch);
    kv.set("lambda2_whole", c.lhs);
    kv.set("lambda1_below", c.lambda1_below);
    kv.set("lambda1_above", c.lambda1_above);
    kv.set("rhs", c.rhs);
    kv.set("slack", c.slack);
    kv.set("holds", c.holds);
    ArtifactWriter w = detail::open_output(cfg);
    w.write("splitting.txt", kv.text());
    log << kv.text();
    return {c.holds ? 0 : 1, w.finish()};
}

}  // namespace sectorlab
