#pragma once

#include <string>
#include <vector>

#include "crosstask/matrix.hpp"

namespace crosstask {

/// Column z-scored performance matrix. Zero-variance columns are mapped
/// to all-zeros and flagged instead of rejected, so degenerate fixtures
/// stay analyzable.
struct NormalizedMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<double> values;  // row-major I x N
    std::vector<double> col_means;
    std::vector<double> col_stds;  // population std, percent units
    std::vector<bool> zero_variance;

    size_t rows() const { return row_labels.size(); }
    size_t cols() const { return col_labels.size(); }
    double at(size_t r, size_t c) const { return values[r * cols() + c]; }
};

/// Population-std z-scoring per column (divide by I, not I-1: the rows
/// are the full population of trained variants). Requires I >= 2.
NormalizedMatrix zscore_columns(const PerformanceMatrix& m);

struct PcaResult {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    size_t k = 0;
    std::vector<double> components;                // k x N row-major loadings
    std::vector<double> explained_variance_ratio;  // k entries, non-increasing
    std::vector<double> projections;               // I x k row-major
    std::vector<bool> zero_variance;               // per column, carried through

    double loading(size_t comp, size_t col) const { return components[comp * col_labels.size() + col]; }
    double projection(size_t row, size_t comp) const { return projections[row * k + comp]; }
};

/// Top-k right singular vectors of the normalized (centered) matrix.
/// explained_variance_ratio_i = sigma_i^2 / sum_j sigma_j^2 over the full
/// spectrum. projections = norm * components^T.
///
/// Sign convention: each component is flipped so that the lowest-index
/// loading whose magnitude is at least half the maximum magnitude is
/// positive (max-magnitude ties broken by lowest column index). The rule
/// uses loadings only, so groups are reproducible from the result alone.
PcaResult pca(const NormalizedMatrix& norm, size_t k);

struct TraitComponent {
    size_t index = 0;
    std::string name;  // free-text trait name, user-assigned; empty by default
    std::vector<std::pair<std::string, double>> loadings;     // sorted descending by value
    std::vector<std::string> positive_group;                  // column order
    std::vector<std::pair<std::string, double>> projections;  // per model variant, row order
};

struct TraitReport {
    double threshold = 0;
    std::vector<TraitComponent> components;
};

/// Group per component: tasks whose loading >= threshold * max positive
/// loading. Zero-variance columns never join a group. Requires
/// 0 < threshold < 1.
TraitReport label_components(const PcaResult& res, double threshold);

std::string pca_result_to_json(const PcaResult& res, const TraitReport& report);

}  // namespace crosstask
