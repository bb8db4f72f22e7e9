#pragma once

// Run configuration: flat key=value text, '#' comments, unknown keys
// rejected. Numeric values accept arithmetic with pi, e.g. "2*pi/3".

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sectorlab/errors.hpp"
#include "sectorlab/io.hpp"

namespace sectorlab {

namespace detail {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view s) : s_(s) {}

    double parse() {
        const double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw FormatError("bad number '" + std::string(s_) + "': " + why);
    }
    double sum() {
        double v = product();
        for (;;) {
            skip();
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                const char op = s_[pos_++];
                const double r = product();
                v = op == '+' ? v + r : v - r;
            } else {
                return v;
            }
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            skip();
            if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
                const char op = s_[pos_++];
                const double r = unary();
                v = op == '*' ? v * r : v / r;
            } else {
                return v;
            }
        }
    }
    double unary() {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '-') {
            ++pos_;
            return -unary();
        }
        if (pos_ < s_.size() && s_[pos_] == '+') {
            ++pos_;
            return unary();
        }
        return atom();
    }
    double atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (s_[pos_] == '(') {
            ++pos_;
            const double v = sum();
            skip();
            if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
            ++pos_;
            return v;
        }
        if (s_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        std::size_t end = pos_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                                   s_[end] == 'e' || s_[end] == 'E' ||
                                   ((s_[end] == '-' || s_[end] == '+') && end > pos_ &&
                                    (s_[end - 1] == 'e' || s_[end - 1] == 'E')))) {
            ++end;
        }
        if (end == pos_) fail("expected a number");
        const double v = parse_double(s_.substr(pos_, end - pos_));
        pos_ = end;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline double parse_number(const std::string& s) {
    const double v = detail::ExpressionParser(s).parse();
    if (!std::isfinite(v)) throw FormatError("number '" + s + "' is not finite");
    return v;
}

/// "eigen:k" reference to the k-th (1-based) mixed Laplacian eigenpair.
inline std::optional<std::size_t> parse_eigen_ref(const std::string& s) {
    if (s.rfind("eigen:", 0) != 0) return std::nullopt;
    const std::string rest = s.substr(6);
    std::size_t k = 0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (res.ec != std::errc() || res.ptr != rest.data() + rest.size() || k < 1) {
        throw FormatError("bad eigen reference '" + s + "' (expected eigen:k with k >= 1)");
    }
    return k;
}

struct ConfigKey {
    const char* name;
    const char* fallback;
    const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"domain.shape", "sector", "sector or rectangle"},
        {"domain.r_inner", "0", "inner radius (0 gives a disc sector)"},
        {"domain.r_outer", "1", "outer radius"},
        {"domain.beta", "pi/2", "opening angle (sector) or length in x1 (rectangle)"},
        {"domain.width", "1", "rectangle width in x2"},
        {"domain.n_r", "64", "radial (x2) nodes"},
        {"domain.n_theta", "64", "angular (x1) nodes"},
        {"problem.kind", "linear", "linear, henon, lane_emden or power"},
        {"problem.lambda", "0", "linear coefficient; eigen:k uses the k-th mixed Laplacian eigenvalue"},
        {"problem.alpha", "0", "Henon exponent"},
        {"problem.weight_exp", "0", "weight exponent for kind=power"},
        {"problem.p", "3", "power p > 1"},
        {"problem.g", "0", "constant Dirichlet data on the arcs"},
        {"solver.method", "ground_state", "newton or ground_state"},
        {"solver.initial", "bump", "newton start: bump, zero or eigen:k"},
        {"solver.tol", "1e-8", "residual tolerance (M^-1 norm)"},
        {"solver.grad_tol", "1e-6", "relative Sobolev gradient tolerance for ground states"},
        {"solver.max_iter", "50", "Newton iteration cap"},
        {"solver.seeds", "3", "ground-state starts: 1 radial, 2 +biased, 3 +mirrored"},
        {"solver.bias", "0.9", "angular bias amplitude of the seeds"},
        {"spectrum.count", "6", "number of eigenpairs"},
        {"spectrum.tol", "1e-8", "eigen residual tolerance"},
        {"spectrum.space", "mixed", "mixed or dirichlet"},
        {"spectrum.zero_tol", "auto", "zero band for the Morse count; auto = 10 h^2 (max|V| + 1)"},
        {"analysis.n_alpha", "31", "rotating-plane samples"},
        {"splitting.alpha", "auto", "interior Dirichlet ray; auto = beta/2"},
        {"rescale.beta", "pi/2", "target opening"},
        {"rescale.p", "3", "power of the source problem"},
        {"rescale.alpha", "0", "Henon exponent of the source problem"},
        {"rescale.n_r", "0", "target radial nodes (0 = source size)"},
        {"rescale.n_theta", "0", "target angular nodes (0 = source size)"},
        {"output.dir", "out", "output directory"},
        {"output.svg", "true", "write the SVG heatmap in classify"},
    };
    return keys;
}

class RunConfig {
public:
    RunConfig() {
        for (const auto& k : config_keys()) values_.set(k.name, std::string(k.fallback));
    }

    static RunConfig from_text(const std::string& text) {
        RunConfig c;
        const KeyValues kv = KeyValues::parse(text);
        for (const auto& [k, v] : kv.entries()) c.set(k, v);
        return c;
    }

    void set(const std::string& key, const std::string& value) {
        if (!values_.has(key)) throw FormatError("unknown config key '" + key + "'");
        values_.set(key, value);
    }

    const std::string& str(const std::string& key) const { return values_.get(key); }
    double number(const std::string& key) const {
        try {
            return parse_number(str(key));
        } catch (const FormatError& e) {
            throw FormatError(key + ": " + e.what());
        }
    }
    std::size_t count(const std::string& key) const {
        const double v = number(key);
        if (v < 0.0 || v != std::floor(v) || v > 1e9) throw FormatError(key + " must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }
    bool flag(const std::string& key) const {
        const auto& s = str(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw FormatError(key + " must be true or false");
    }

    /// Every key in declaration order except output.dir, so reruns into a
    /// different directory produce identical artifacts.
    std::string canonical_text() const {
        std::string out;
        for (const auto& [k, v] : values_.entries()) {
            if (k != "output.dir") out += k + '=' + v + '\n';
        }
        return out;
    }

private:
    KeyValues values_;
};

}  // namespace sectorlab
