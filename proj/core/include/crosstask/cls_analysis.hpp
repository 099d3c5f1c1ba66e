#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crosstask/dist_stats.hpp"

namespace crosstask {

/// Trim whitespace, case-fold, strip trailing punctuation. What LLM
/// predictions go through before local label matching.
std::string normalize_prediction(std::string_view raw);

/// Square gold x predicted count matrix plus a first-class `unparseable`
/// column for predictions outside the label set.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<size_t> counts;       // labels.size()^2, row-major gold x predicted
    std::vector<size_t> unparseable;  // per gold label
    size_t total = 0;

    size_t at(size_t gold, size_t pred) const { return counts[gold * labels.size() + pred]; }
    size_t gold_total(size_t gold) const;
    size_t predicted_total(size_t pred) const;
};

/// Gold labels must all be inside label_set (kSchema otherwise);
/// predictions are normalized first, and non-matching ones land in the
/// unparseable column.
ConfusionMatrix confusion_matrix(std::span<const std::string> predictions,
                                 std::span<const std::string> golds,
                                 std::span<const std::string> label_set);

struct ClassMetrics {
    std::string label;
    std::optional<double> precision;  // empty on 0/0
    std::optional<double> recall;
    double predicted_rate = 0;
    double gold_rate = 0;
    double skew = 0;  // predicted_rate - gold_rate
};

struct BiasMetrics {
    std::vector<ClassMetrics> per_class;
    double unparseable_rate = 0;
};

BiasMetrics bias_metrics(const ConfusionMatrix& cm);

/// TP/FP/FN/TN length profiles for a binary task. Predictions that do
/// not normalize to the positive label count as negative predictions, so
/// the four buckets always partition the records.
struct OutcomeLengths {
    std::optional<LengthProfile> tp, fp, fn, tn;
    size_t tp_count = 0, fp_count = 0, fn_count = 0, tn_count = 0;
};

OutcomeLengths outcome_conditioned_lengths(std::span<const std::string> predictions,
                                           std::span<const std::string> golds,
                                           std::span<const std::string> texts,
                                           std::span<const std::string> label_set,
                                           const std::string& positive_label, LengthUnit unit);

std::string confusion_to_json(const ConfusionMatrix& cm, const BiasMetrics& metrics);

}  // namespace crosstask
