#include "crosstask/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crosstask/errors.hpp"

namespace crosstask {

namespace {

constexpr int kCell = 34;
constexpr int kLeftMargin = 110;
constexpr int kTopMargin = 46;

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string lerp_color(const int low[3], const int high[3], double t) {
    t = std::clamp(t, 0.0, 1.0);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(low[0] + t * (high[0] - low[0]))),
                  static_cast<int>(std::lround(low[1] + t * (high[1] - low[1]))),
                  static_cast<int>(std::lround(low[2] + t * (high[2] - low[2]))));
    return buf;
}

std::string svg_open(int width, int height) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<style>text{font-family:Helvetica,Arial,sans-serif;font-size:11px;}"
        << ".title{font-size:14px;font-weight:bold;}</style>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out.str();
}

void check_finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorCode::kNumeric, "non-finite cell in figure input");
}

std::string matrix_svg(std::span<const std::string> row_labels,
                       std::span<const std::string> col_labels, std::span<const double> values,
                       const std::string& title,
                       const std::function<std::string(double)>& color_of) {
    if (values.size() != row_labels.size() * col_labels.size())
        fail(ErrorCode::kSchema, "figure value count does not match labels");
    check_finite(values);

    const int rows = static_cast<int>(row_labels.size());
    const int cols = static_cast<int>(col_labels.size());
    const int width = kLeftMargin + cols * kCell + 20;
    const int height = kTopMargin + rows * kCell + 70;

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<text class=\"title\" x=\"10\" y=\"20\">" << escape_xml(title) << "</text>\n";
    for (int c = 0; c < cols; ++c) {
        const int x = kLeftMargin + c * kCell + kCell / 2;
        out << "<text x=\"" << x << "\" y=\"" << kTopMargin + rows * kCell + 14
            << "\" text-anchor=\"end\" transform=\"rotate(-45 " << x << ' '
            << kTopMargin + rows * kCell + 14 << ")\">" << escape_xml(col_labels[c]) << "</text>\n";
    }
    for (int r = 0; r < rows; ++r) {
        out << "<text x=\"" << kLeftMargin - 6 << "\" y=\"" << kTopMargin + r * kCell + kCell / 2 + 4
            << "\" text-anchor=\"end\">" << escape_xml(row_labels[r]) << "</text>\n";
        for (int c = 0; c < cols; ++c) {
            const double v = values[static_cast<size_t>(r) * cols + c];
            out << "<rect x=\"" << kLeftMargin + c * kCell << "\" y=\"" << kTopMargin + r * kCell
                << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"" << color_of(v)
                << "\" stroke=\"#cccccc\"/>\n";
            out << "<text x=\"" << kLeftMargin + c * kCell + kCell / 2 << "\" y=\""
                << kTopMargin + r * kCell + kCell / 2 + 4 << "\" text-anchor=\"middle\">" << fmt(v)
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::string svg_heatmap(std::span<const std::string> row_labels,
                        std::span<const std::string> col_labels, std::span<const double> values,
                        const ColorScale& scale, const std::string& title) {
    if (!(scale.max_value > scale.min_value))
        fail(ErrorCode::kArgument, "color scale must have max > min");
    return matrix_svg(row_labels, col_labels, values, title, [&](double v) {
        return lerp_color(scale.low, scale.high,
                          (v - scale.min_value) / (scale.max_value - scale.min_value));
    });
}

std::string svg_gain_table(std::span<const std::string> row_labels,
                           std::span<const std::string> col_labels,
                           std::span<const double> values, const std::string& title) {
    check_finite(values);
    double peak = 1e-12;
    for (double v : values) peak = std::max(peak, std::abs(v));
    const int white[3] = {255, 255, 255};
    const int red[3] = {197, 27, 45};
    const int blue[3] = {33, 68, 160};
    return matrix_svg(row_labels, col_labels, values, title, [&](double v) {
        if (v >= 0) return lerp_color(white, red, v / peak);
        return lerp_color(white, blue, -v / peak);
    });
}

std::string svg_scree(std::span<const double> ratios, const std::string& title) {
    check_finite(ratios);
    if (ratios.empty()) fail(ErrorCode::kEmptyInput, "scree plot needs at least one ratio");

    const int n = static_cast<int>(ratios.size());
    const int bar_w = 46;
    const int plot_h = 180;
    const int width = 70 + n * bar_w + 30;
    const int height = kTopMargin + plot_h + 50;

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<text class=\"title\" x=\"10\" y=\"20\">" << escape_xml(title) << "</text>\n";
    out << "<line x1=\"60\" y1=\"" << kTopMargin + plot_h << "\" x2=\"" << 60 + n * bar_w
        << "\" y2=\"" << kTopMargin + plot_h << "\" stroke=\"black\"/>\n";

    double cumulative = 0;
    std::ostringstream polyline;
    for (int i = 0; i < n; ++i) {
        const double r = ratios[static_cast<size_t>(i)];
        const int bar_h = static_cast<int>(std::lround(r * plot_h));
        const int x = 60 + i * bar_w + 6;
        out << "<rect x=\"" << x << "\" y=\"" << kTopMargin + plot_h - bar_h << "\" width=\""
            << bar_w - 12 << "\" height=\"" << bar_h << "\" fill=\"#5b7fd4\"/>\n";
        out << "<text x=\"" << x + (bar_w - 12) / 2 << "\" y=\"" << kTopMargin + plot_h + 16
            << "\" text-anchor=\"middle\">PC" << i << "</text>\n";
        out << "<text x=\"" << x + (bar_w - 12) / 2 << "\" y=\""
            << kTopMargin + plot_h - bar_h - 4 << "\" text-anchor=\"middle\">" << fmt(r, "%.3f")
            << "</text>\n";
        cumulative += r;
        polyline << (i ? " " : "") << x + (bar_w - 12) / 2 << ','
                 << kTopMargin + plot_h - static_cast<int>(std::lround(cumulative * plot_h));
    }
    out << "<polyline points=\"" << polyline.str()
        << "\" fill=\"none\" stroke=\"#c51b2d\" stroke-width=\"2\"/>\n";
    out << "<text x=\"10\" y=\"" << kTopMargin + plot_h + 36 << "\">cumulative "
        << fmt(cumulative, "%.4f") << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string svg_kde_curves(std::span<const NamedCurve> curves, const std::string& title) {
    if (curves.empty()) fail(ErrorCode::kEmptyInput, "kde figure needs at least one curve");
    const char* palette[] = {"#2144a0", "#c51b2d", "#2e8540", "#8640b0", "#b06e16", "#3a3a3a"};

    double lo = curves[0].curve.grid.front(), hi = curves[0].curve.grid.back(), peak = 0;
    for (const auto& nc : curves) {
        check_finite(nc.curve.grid);
        check_finite(nc.curve.density);
        lo = std::min(lo, nc.curve.grid.front());
        hi = std::max(hi, nc.curve.grid.back());
        for (double d : nc.curve.density) peak = std::max(peak, d);
    }
    if (peak == 0) peak = 1;

    const int plot_w = 440, plot_h = 200, left = 50, top = kTopMargin;
    const int width = left + plot_w + 140;
    const int height = top + plot_h + 50;

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<text class=\"title\" x=\"10\" y=\"20\">" << escape_xml(title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (size_t k = 0; k < curves.size(); ++k) {
        const auto& c = curves[k].curve;
        std::ostringstream pts;
        for (size_t i = 0; i < c.grid.size(); ++i) {
            const double x = left + (c.grid[i] - lo) / (hi - lo) * plot_w;
            const double y = top + plot_h - c.density[i] / peak * (plot_h - 8);
            pts << (i ? " " : "") << fmt(x, "%.1f") << ',' << fmt(y, "%.1f");
        }
        const char* color = palette[k % (sizeof(palette) / sizeof(palette[0]))];
        out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << top + 14 + 16 * static_cast<int>(k)
            << "\" fill=\"" << color << "\">" << escape_xml(curves[k].name) << " (h="
            << fmt(c.bandwidth, "%.3f") << ")</text>\n";
    }
    out << "<text x=\"" << left << "\" y=\"" << top + plot_h + 16 << "\">" << fmt(lo, "%.1f")
        << "</text>\n";
    out << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"end\">" << fmt(hi, "%.1f") << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write file: " + path);
    out << content;
}

}  // namespace crosstask
