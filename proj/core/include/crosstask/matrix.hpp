#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crosstask {

/// I x N accuracy table. Rows are model variants, columns are target
/// tasks, cells are percentages in [0, 100].
struct PerformanceMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<double> values;  // row-major, row_labels.size() * col_labels.size()
    std::optional<std::string> baseline_row;

    size_t rows() const { return row_labels.size(); }
    size_t cols() const { return col_labels.size(); }

    double at(size_t r, size_t c) const { return values[r * cols() + c]; }
    double& at(size_t r, size_t c) { return values[r * cols() + c]; }

    /// Index of a row/column label, or throws Error(kLookup).
    size_t row_index(std::string_view label) const;
    size_t col_index(std::string_view label) const;

    /// Throws Error(kSchema) on duplicate labels, size mismatch or
    /// non-finite cells.
    void validate() const;
};

/// Header is `model,<task1>,...,<taskN>`; one row per model variant.
/// A row labeled "None" becomes the baseline row.
PerformanceMatrix load_matrix_csv(const std::string& path);

/// Cells serialized with 2 decimal places (the precision accuracy is
/// reported at).
void write_matrix_csv(const PerformanceMatrix& m, const std::string& path);
std::string matrix_to_csv(const PerformanceMatrix& m);

}  // namespace crosstask
