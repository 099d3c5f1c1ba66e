#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosstask/dist_stats.hpp"
#include "crosstask/matrix.hpp"

namespace crosstask {

/// Fine-tuned accuracy minus baseline accuracy, in percentage points.
/// Same labels as the source matrix minus the baseline row.
struct GainMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<double> values;
    std::string baseline_label;
    std::vector<double> baseline_values;  // per column

    size_t rows() const { return row_labels.size(); }
    size_t cols() const { return col_labels.size(); }
    double at(size_t r, size_t c) const { return values[r * cols() + c]; }
    size_t row_index(std::string_view label) const;
    size_t col_index(std::string_view label) const;
};

GainMatrix gain_matrix(const PerformanceMatrix& m);

/// Maps a source-dataset row label to its evaluation column when the two
/// names differ (MetaMath -> GSM8K). An explicit null marks a row that is
/// not a source dataset (the few-shot baseline). Unmapped rows resolve by
/// identity against the column list.
struct AliasMap {
    std::map<std::string, std::optional<std::string>> entries;

    static AliasMap load(const std::string& path);
};

struct AsymmetryEntry {
    std::string dataset_a;  // row labels; a < b lexicographically for two-sided pairs
    std::string dataset_b;  // for one-sided entries, the target-only column label
    std::string eval_col_a;
    std::string eval_col_b;
    double gain_ab = 0;                 // fine-tune on a, evaluate on b's column
    std::optional<double> gain_ba;      // absent for one-sided pairs
    std::optional<double> asymmetry;    // gain_ab - gain_ba
};

/// One entry per unordered source pair where both directions exist, plus
/// one-sided entries for columns no source row covers. Throws
/// Error(kConfig) naming any row the alias map cannot resolve.
std::vector<AsymmetryEntry> asymmetry(const GainMatrix& gains, const AliasMap& aliases);

enum class DomainMatch { kSame, kDifferent };
enum class StatsMatch { kSimilar, kDifferent };

struct QuadrantEntry {
    std::string source;
    std::string target;
    DomainMatch domain = DomainMatch::kDifferent;
    StatsMatch stats = StatsMatch::kDifferent;
    double gain = 0;
    double ks = 0;                       // token-length KS distance
    std::optional<double> tv;            // class-distribution TV when both sides have classes
};

struct QuadrantTable {
    double ks_threshold = 0;
    double tv_threshold = 0;
    std::vector<QuadrantEntry> entries;  // row-major over (source row, target col)

    size_t count(DomainMatch d, StatsMatch s) const;
};

/// stats similar iff KS(token lengths) <= ks_threshold and, when both
/// datasets carry class profiles, TV(class proportions) <= tv_threshold.
QuadrantTable categorize_pairs(const GainMatrix& gains,
                               const std::map<std::string, DatasetProfile>& profiles,
                               const std::map<std::string, std::string>& domain_map,
                               double ks_threshold, double tv_threshold);

/// rowA - rowB per column.
std::vector<std::pair<std::string, double>> row_diff(const PerformanceMatrix& m,
                                                     const std::string& row_a,
                                                     const std::string& row_b);

std::string transfer_to_json(const GainMatrix& gains, const std::vector<AsymmetryEntry>& pairs,
                             const std::optional<QuadrantTable>& quadrants);

}  // namespace crosstask
