#pragma once

#include <span>
#include <string>
#include <vector>

#include "crosstask/dist_stats.hpp"

namespace crosstask {

/// Labeled matrix heatmap. Cell colors interpolate linearly between the
/// scale's endpoint colors over [min_value, max_value]; output bytes are
/// deterministic for fixed input. NaN cells are rejected.
struct ColorScale {
    double min_value = 0;
    double max_value = 1;
    // RGB endpoints; defaults run white -> crimson.
    int low[3] = {255, 255, 255};
    int high[3] = {197, 27, 45};
};

std::string svg_heatmap(std::span<const std::string> row_labels,
                        std::span<const std::string> col_labels, std::span<const double> values,
                        const ColorScale& scale, const std::string& title);

/// Bar-per-component explained variance with a cumulative polyline.
std::string svg_scree(std::span<const double> ratios, const std::string& title);

/// One polyline per curve over a shared axis box.
struct NamedCurve {
    std::string name;
    KdeCurve curve;
};
std::string svg_kde_curves(std::span<const NamedCurve> curves, const std::string& title);

/// Signed-value table render (gains): blue for negative, red for
/// positive, scaled by |max|.
std::string svg_gain_table(std::span<const std::string> row_labels,
                           std::span<const std::string> col_labels,
                           std::span<const double> values, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace crosstask
