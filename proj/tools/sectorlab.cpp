// sectorlab: command-line front end.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sectorlab/commands.hpp"

using namespace sectorlab;

int main(int argc, char** argv) {
    CLI::App app{"Sector-domain semilinear elliptic laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    std::map<std::string, std::string> overrides;
    for (const auto& key : config_keys()) {
        const std::string name = key.name;
        app.add_option_function<std::string>(
               "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; }, key.help)
            ->default_str(key.fallback);
    }

    auto* bessel = app.add_subcommand("bessel", "zeros j_{nu,k} of J_nu as CSV");
    std::vector<double> nus{0.0};
    int k = 1;
    int kmax = 0;
    bessel->add_option("--nu", nus, "orders (repeatable)");
    bessel->add_option("--k", k, "zero index")->check(CLI::PositiveNumber);
    bessel->add_option("--kmax", kmax, "print zeros k..kmax");

    auto* crit = app.add_subcommand("critical-angle", "opening with j_{pi/beta,1} = target");
    std::optional<double> target;
    crit->add_option("--target", target, "default j_{0,2}");

    std::optional<std::string> field;
    std::string required_field;
    auto* spectrum = app.add_subcommand("spectrum", "low eigenpairs and Morse index");
    spectrum->add_option("--field", field, "linearize at this field (default u = 0)");
    auto* solve = app.add_subcommand("solve", "Newton or ground-state solve");
    auto* classify_cmd = app.add_subcommand("classify", "angular symmetry verdict of a solution");
    classify_cmd->add_option("--field", required_field, "solution field file")->required();
    auto* rescale = app.add_subcommand("rescale", "transplant a half-disc solution to a sector");
    rescale->add_option("--field", required_field, "half-disc solution field file")->required();
    auto* split = app.add_subcommand("splitting-check", "lambda_2 versus the two half-sector lambda_1");
    split->add_option("--field", field, "linearize at this field (default u = 0)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::from_text(read_file(config_path));
        for (const auto& [key, value] : overrides) cfg.set(key, value);
        if (!out_dir.empty()) cfg.set("output.dir", out_dir);
        const std::optional<std::string> out_opt =
            out_dir.empty() ? std::nullopt : std::optional<std::string>(cfg.str("output.dir"));

        if (*bessel) return cmd_bessel(nus, k, std::max(k, kmax), std::cout, out_opt);
        if (*crit) return cmd_critical_angle(target, std::cout, out_opt);
        if (*spectrum) return cmd_spectrum(cfg, field, std::cout).exit_code;
        if (*solve) return cmd_solve(cfg, std::cout).exit_code;
        if (*classify_cmd) return cmd_classify(cfg, required_field, std::cout).exit_code;
        if (*rescale) return cmd_rescale(cfg, required_field, std::cout).exit_code;
        if (*split) return cmd_splitting(cfg, field, std::cout).exit_code;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (!e.trace().empty()) {
            std::cerr << "trace:";
            for (double t : e.trace()) std::cerr << ' ' << format_double(t);
            std::cerr << '\n';
        }
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
