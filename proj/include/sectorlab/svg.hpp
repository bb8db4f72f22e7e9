#pragma once

// SVG heatmaps. Every node is drawn as its own cell (an annular wedge on
// polar grids, a rectangle otherwise) with no smoothing.
//
// Colormap: diverging blue-white-red, symmetric about zero, each panel
// scaled by its own max |value|: -max -> #2166ac, 0 -> #ffffff,
// +max -> #b2182b, linear in each half.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "sectorlab/grid.hpp"

namespace sectorlab {

inline std::string diverging_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    const double lo[3] = {0x21, 0x66, 0xac};
    const double hi[3] = {0xb2, 0x18, 0x2b};
    const double* end = t < 0.0 ? lo : hi;
    const double a = std::abs(t);
    char buf[8];
    int c[3];
    for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(255.0 + a * (end[k] - 255.0)));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

namespace detail {

inline std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

/// Cells of one panel drawn into a box of side `size` at (ox, oy).
inline std::string panel(const ScalarField& u, const std::string& title, double ox, double oy, double size) {
    const TensorGrid& g = u.grid;
    const double vmax = std::max(u.max_abs(), 1e-300);
    std::string out;
    out += "<g>\n<text x=\"" + fmt3(ox) + "\" y=\"" + fmt3(oy - 6.0) + "\" font-size=\"14\">" + title +
           " (max |value| " + fmt3(u.max_abs()) + ")</text>\n";

    // World bounding box.
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;
    const double beta = g.beta();
    if (g.is_polar()) {
        const double ro = g.sector_domain().r_outer;
        for (int k = 0; k <= 256; ++k) {
            const double th = beta * k / 256.0;
            xmin = std::min(xmin, ro * std::cos(th));
            xmax = std::max(xmax, ro * std::cos(th));
            ymin = std::min(ymin, ro * std::sin(th));
            ymax = std::max(ymax, ro * std::sin(th));
        }
    } else {
        xmax = beta;
        ymax = g.rect_domain().width;
    }
    const double scale = size / std::max(xmax - xmin, ymax - ymin);
    auto px = [&](double x) { return ox + (x - xmin) * scale; };
    auto py = [&](double y) { return oy + (ymax - y) * scale; };

    const double hr = g.h_r();
    const double ht = g.h_theta();
    const double r_lo = g.is_polar() ? g.sector_domain().r_inner : 0.0;
    const double r_hi = g.is_polar() ? g.sector_domain().r_outer : g.rect_domain().width;
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        const double a0 = std::max(r_lo, g.r(i) - 0.5 * hr);
        const double a1 = std::min(r_hi, g.r(i) + 0.5 * hr);
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const double t0 = std::max(0.0, g.theta(j) - 0.5 * ht);
            const double t1 = std::min(beta, g.theta(j) + 0.5 * ht);
            const std::string fill = diverging_color(u(i, j) / vmax);
            if (g.is_polar()) {
                const std::string rr1 = fmt3(a1 * scale);
                const std::string rr0 = fmt3(a0 * scale);
                out += "<path fill=\"" + fill + "\" d=\"M" + fmt3(px(a1 * std::cos(t0))) + ',' +
                       fmt3(py(a1 * std::sin(t0))) + " A" + rr1 + ',' + rr1 + " 0 0 0 " +
                       fmt3(px(a1 * std::cos(t1))) + ',' + fmt3(py(a1 * std::sin(t1))) + " L" +
                       fmt3(px(a0 * std::cos(t1))) + ',' + fmt3(py(a0 * std::sin(t1)));
                if (a0 > 0.0) {
                    out += " A" + rr0 + ',' + rr0 + " 0 0 1 " + fmt3(px(a0 * std::cos(t0))) + ',' +
                           fmt3(py(a0 * std::sin(t0)));
                }
                out += " Z\"/>\n";
            } else {
                out += "<rect fill=\"" + fill + "\" x=\"" + fmt3(px(t0)) + "\" y=\"" + fmt3(py(a1)) + "\" width=\"" +
                       fmt3((t1 - t0) * scale) + "\" height=\"" + fmt3((a1 - a0) * scale) + "\"/>\n";
            }
        }
    }
    out += "</g>\n";
    return out;
}

}  // namespace detail

/// Side-by-side heatmaps of the given fields (all on the same grid).
inline std::string heatmap_svg(const std::vector<std::pair<std::string, ScalarField>>& panels, double size = 360.0) {
    const double margin = 30.0;
    const double width = margin + static_cast<double>(panels.size()) * (size + margin);
    const double height = size + 2.0 * margin;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt3(width) + "\" height=\"" +
                      detail::fmt3(height) + "\" shape-rendering=\"crispEdges\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#f4f4f4\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        out += detail::panel(panels[k].second, panels[k].first, margin + static_cast<double>(k) * (size + margin),
                             margin, size);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace sectorlab
