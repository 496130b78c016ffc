#include "resonant/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "resonant/errors.hpp"

namespace resonant {

namespace {

constexpr const char* kMaskColor = "#3050c8";
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    }
};

void header(std::ostringstream& o, int w, int h) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void text(std::ostringstream& o, double x, double y, const std::string& s, const char* anchor = "middle",
          const char* extra = "") {
    o << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\"" << extra << '>'
      << escape(s) << "</text>\n";
}

/// Linear interpolation through a five-stop sequential palette, t in [0,1].
std::string palette(double t) {
    static const double stops[5][3] = {
        {255, 245, 235}, {253, 190, 133}, {253, 141, 60}, {217, 71, 1}, {127, 39, 4}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace

std::string line_plot(const std::vector<LineSeries>& series, const PlotOptions& options) {
    const double pw = options.width - kMarginLeft - kMarginRight;
    const double ph = options.height - kMarginTop - kMarginBottom;
    auto yval = [&](double v) { return options.log_y ? (v == 0.0 ? std::nan("") : std::log10(std::abs(v))) : v; };

    Range rx, ry;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DimensionMismatch("series '" + s.label + "' has unequal x and y");
        for (Eigen::Index i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(yval(s.y[i]))) continue;
            rx.add(s.x[i]);
            ry.add(yval(s.y[i]));
        }
    }
    rx.finish();
    ry.finish();
    auto px = [&](double v) { return kMarginLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double v) { return kMarginTop + (1.0 - (v - ry.lo) / (ry.hi - ry.lo)) * ph; };

    std::ostringstream o;
    header(o, options.width, options.height);
    text(o, options.width / 2.0, 22, options.title, "middle", " font-size=\"14\"");
    o << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
        const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
        text(o, px(vx), kMarginTop + ph + 16, tick(vx));
        text(o, kMarginLeft - 6, py(vy) + 4, options.log_y ? "1e" + tick(vy) : tick(vy), "end");
    }
    text(o, kMarginLeft + pw / 2, options.height - 10, options.x_label);
    text(o, 16, kMarginTop + ph / 2, options.y_label, "middle",
         (" transform=\"rotate(-90 16 " + num(kMarginTop + ph / 2) + ")\"").c_str());

    double legend_y = kMarginTop + 14;
    for (const auto& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
        bool first = true;
        for (Eigen::Index i = 0; i < s.x.size(); ++i) {
            const double v = yval(s.y[i]);
            if (!std::isfinite(v) || !std::isfinite(s.x[i])) continue;
            o << (first ? "" : " ") << num(px(s.x[i])) << ',' << num(py(v));
            first = false;
        }
        o << "\"/>\n";
        if (!s.label.empty()) {
            const double lx = kMarginLeft + pw - 120;
            o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y - 4) << "\" x2=\"" << num(lx + 18)
              << "\" y2=\"" << num(legend_y - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            text(o, lx + 24, legend_y, s.label, "start");
            legend_y += 16;
        }
    }
    o << "</svg>\n";
    return o.str();
}

std::string heatmap_svg(const HeatmapResult& result, const std::string& title) {
    const auto na = result.amplitudes.size(), nf = result.frequencies.size();
    if (result.cells.size() != na * nf) throw DimensionMismatch("heatmap cells do not match the grids");
    const int width = 760, height = 440, bar = 60;
    const double pw = width - kMarginLeft - kMarginRight - bar;
    const double ph = height - kMarginTop - kMarginBottom;
    const double cw = pw / static_cast<double>(nf), ch = ph / static_cast<double>(na);

    Range r;
    for (const auto& c : result.cells)
        if (!c.masked && c.nmse > 0.0) r.add(std::log10(c.nmse));
    r.finish();

    std::ostringstream o;
    header(o, width, height);
    text(o, width / 2.0, 22, title, "middle", " font-size=\"14\"");
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& c = result.at(a, f);
            std::string fill = kMaskColor;
            if (!c.masked) fill = c.nmse > 0.0 ? palette((std::log10(c.nmse) - r.lo) / (r.hi - r.lo)) : palette(0.0);
            // Amplitude increases upwards.
            const double x = kMarginLeft + static_cast<double>(f) * cw;
            const double y = kMarginTop + static_cast<double>(na - 1 - a) * ch;
            o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw) << "\" height=\""
              << num(ch) << "\" fill=\"" << fill << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
        }
    }
    for (std::size_t f = 0; f < nf; ++f)
        text(o, kMarginLeft + (static_cast<double>(f) + 0.5) * cw, kMarginTop + ph + 16, tick(result.frequencies[f]));
    for (std::size_t a = 0; a < na; ++a)
        text(o, kMarginLeft - 6, kMarginTop + (static_cast<double>(na - 1 - a) + 0.5) * ch + 4,
             tick(result.amplitudes[a]), "end");
    text(o, kMarginLeft + pw / 2, height - 10, "frequency");
    text(o, 16, kMarginTop + ph / 2, "amplitude", "middle",
         (" transform=\"rotate(-90 16 " + num(kMarginTop + ph / 2) + ")\"").c_str());

    const double bx = kMarginLeft + pw + 20;
    const int steps = 32;
    for (int k = 0; k < steps; ++k) {
        const double t = (k + 0.5) / steps;
        o << "<rect x=\"" << num(bx) << "\" y=\"" << num(kMarginTop + (1.0 - (k + 1.0) / steps) * ph)
          << "\" width=\"14\" height=\"" << num(ph / steps + 0.5) << "\" fill=\"" << palette(t) << "\"/>\n";
    }
    text(o, bx + 18, kMarginTop + 8, "1e" + tick(r.hi), "start");
    text(o, bx + 18, kMarginTop + ph, "1e" + tick(r.lo), "start");
    o << "</svg>\n";
    return o.str();
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "trajectory") return PlotKind::trajectory;
    if (name == "residual") return PlotKind::residual;
    if (name == "phase") return PlotKind::phase;
    throw InvalidArgument("unknown plot kind '" + name + "' (trajectory, residual or phase)");
}

std::string prediction_plot(const Series& prediction, PlotKind kind) {
    const auto has = [&](const char* name) { return prediction.find(name) >= 0; };
    const auto col = [&](const std::string& name) -> Eigen::VectorXd { return prediction.select({name}).col(0); };
    Eigen::VectorXd t;
    if (has("t")) t = col("t");
    else if (has("k")) t = col("k");
    else t = Eigen::VectorXd::LinSpaced(prediction.rows(), 0.0, static_cast<double>(prediction.rows() - 1));
    const bool truth = has("x") && has("p");
    const bool pred = has("x_pred") && has("p_pred");
    if (!truth && !pred) throw InvalidArgument("plot input needs x,p and/or x_pred,p_pred columns");

    switch (kind) {
        case PlotKind::trajectory: {
            std::vector<LineSeries> lines;
            if (truth) lines.push_back({"x", t, col("x"), "#1f77b4"});
            if (pred) lines.push_back({"x predicted", t, col("x_pred"), "#d62728"});
            return line_plot(lines, {"Position forecast", has("t") ? "t" : "step", "x"});
        }
        case PlotKind::residual: {
            if (!truth || !pred) throw InvalidArgument("residual plot needs both x,p and x_pred,p_pred columns");
            PlotOptions opts{"Forecast residuals", has("t") ? "t" : "step", "|residual|"};
            opts.log_y = true;
            return line_plot({{"x", t, col("x") - col("x_pred"), "#1f77b4"},
                              {"p", t, col("p") - col("p_pred"), "#ff7f0e"}},
                             opts);
        }
        case PlotKind::phase: {
            std::vector<LineSeries> lines;
            if (truth) lines.push_back({"truth", col("x"), col("p"), "#1f77b4"});
            if (pred) lines.push_back({"predicted", col("x_pred"), col("p_pred"), "#d62728"});
            return line_plot(lines, {"Phase space", "x", "p"});
        }
    }
    throw InvalidArgument("unknown plot kind");
}

}  // namespace resonant
