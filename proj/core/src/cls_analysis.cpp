#include "crosstask/cls_analysis.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

std::string normalize_prediction(std::string_view raw) {
    size_t begin = 0, end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    while (end > begin && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    for (size_t i = begin; i < end; ++i)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    return out;
}

size_t ConfusionMatrix::gold_total(size_t gold) const {
    size_t sum = unparseable[gold];
    for (size_t p = 0; p < labels.size(); ++p) sum += at(gold, p);
    return sum;
}

size_t ConfusionMatrix::predicted_total(size_t pred) const {
    size_t sum = 0;
    for (size_t g = 0; g < labels.size(); ++g) sum += at(g, pred);
    return sum;
}

namespace {

size_t label_index(std::span<const std::string> labels, const std::string& normalized) {
    for (size_t i = 0; i < labels.size(); ++i)
        if (normalize_prediction(labels[i]) == normalized) return i;
    return labels.size();
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const std::string> predictions,
                                 std::span<const std::string> golds,
                                 std::span<const std::string> label_set) {
    if (predictions.size() != golds.size())
        fail(ErrorCode::kSchema, "predictions and golds differ in length");
    if (label_set.empty()) fail(ErrorCode::kSchema, "label set is empty");

    ConfusionMatrix cm;
    cm.labels.assign(label_set.begin(), label_set.end());
    cm.counts.assign(cm.labels.size() * cm.labels.size(), 0);
    cm.unparseable.assign(cm.labels.size(), 0);
    cm.total = predictions.size();

    for (size_t i = 0; i < predictions.size(); ++i) {
        const size_t g = label_index(cm.labels, normalize_prediction(golds[i]));
        if (g == cm.labels.size())
            fail(ErrorCode::kSchema, "gold label outside label set: '" + golds[i] + "'");
        const size_t p = label_index(cm.labels, normalize_prediction(predictions[i]));
        if (p == cm.labels.size()) ++cm.unparseable[g];
        else ++cm.counts[g * cm.labels.size() + p];
    }
    return cm;
}

BiasMetrics bias_metrics(const ConfusionMatrix& cm) {
    BiasMetrics out;
    const double total = static_cast<double>(cm.total);
    size_t unparseable_total = 0;
    for (size_t g = 0; g < cm.labels.size(); ++g) unparseable_total += cm.unparseable[g];
    out.unparseable_rate = cm.total == 0 ? 0.0 : static_cast<double>(unparseable_total) / total;

    for (size_t c = 0; c < cm.labels.size(); ++c) {
        ClassMetrics m;
        m.label = cm.labels[c];
        const size_t tp = cm.at(c, c);
        const size_t predicted = cm.predicted_total(c);
        const size_t gold = cm.gold_total(c);
        if (predicted > 0) m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        if (gold > 0) m.recall = static_cast<double>(tp) / static_cast<double>(gold);
        m.predicted_rate = cm.total == 0 ? 0.0 : static_cast<double>(predicted) / total;
        m.gold_rate = cm.total == 0 ? 0.0 : static_cast<double>(gold) / total;
        m.skew = m.predicted_rate - m.gold_rate;
        out.per_class.push_back(std::move(m));
    }
    return out;
}

OutcomeLengths outcome_conditioned_lengths(std::span<const std::string> predictions,
                                           std::span<const std::string> golds,
                                           std::span<const std::string> texts,
                                           std::span<const std::string> label_set,
                                           const std::string& positive_label, LengthUnit unit) {
    if (label_set.size() != 2)
        fail(ErrorCode::kArgument, "outcome-conditioned lengths need a binary label set");
    if (predictions.size() != golds.size() || predictions.size() != texts.size())
        fail(ErrorCode::kSchema, "predictions, golds and texts must be parallel");
    const std::string pos = normalize_prediction(positive_label);
    if (normalize_prediction(label_set[0]) != pos && normalize_prediction(label_set[1]) != pos)
        fail(ErrorCode::kArgument, "positive label not in the label set");

    std::vector<long> tp, fp, fn, tn;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const bool gold_pos = normalize_prediction(golds[i]) == pos;
        const bool pred_pos = normalize_prediction(predictions[i]) == pos;
        const long len = text_length(texts[i], unit);
        if (gold_pos && pred_pos) tp.push_back(len);
        else if (!gold_pos && pred_pos) fp.push_back(len);
        else if (gold_pos && !pred_pos) fn.push_back(len);
        else tn.push_back(len);
    }

    OutcomeLengths out;
    out.tp_count = tp.size();
    out.fp_count = fp.size();
    out.fn_count = fn.size();
    out.tn_count = tn.size();
    if (!tp.empty()) out.tp = length_profile_from_samples(std::move(tp), unit);
    if (!fp.empty()) out.fp = length_profile_from_samples(std::move(fp), unit);
    if (!fn.empty()) out.fn = length_profile_from_samples(std::move(fn), unit);
    if (!tn.empty()) out.tn = length_profile_from_samples(std::move(tn), unit);
    return out;
}

std::string confusion_to_json(const ConfusionMatrix& cm, const BiasMetrics& metrics) {
    json j;
    j["kind"] = "confusion_matrix";
    j["labels"] = cm.labels;
    j["total"] = cm.total;

    json raw = json::array();
    json row_normalized = json::array();
    for (size_t g = 0; g < cm.labels.size(); ++g) {
        json raw_row = json::array();
        json norm_row = json::array();
        const double denom = static_cast<double>(cm.gold_total(g));
        for (size_t p = 0; p < cm.labels.size(); ++p) {
            raw_row.push_back(cm.at(g, p));
            norm_row.push_back(denom == 0 ? 0.0 : static_cast<double>(cm.at(g, p)) / denom);
        }
        raw_row.push_back(cm.unparseable[g]);
        norm_row.push_back(denom == 0 ? 0.0 : static_cast<double>(cm.unparseable[g]) / denom);
        raw.push_back(std::move(raw_row));
        row_normalized.push_back(std::move(norm_row));
    }
    j["counts"] = raw;                       // last column is `unparseable`
    j["row_normalized"] = row_normalized;
    j["unparseable_rate"] = metrics.unparseable_rate;

    json per_class = json::array();
    for (const auto& m : metrics.per_class) {
        json c;
        c["label"] = m.label;
        if (m.precision) c["precision"] = *m.precision;
        else c["precision"] = nullptr;
        if (m.recall) c["recall"] = *m.recall;
        else c["recall"] = nullptr;
        c["predicted_rate"] = m.predicted_rate;
        c["gold_rate"] = m.gold_rate;
        c["skew"] = m.skew;
        per_class.push_back(std::move(c));
    }
    j["per_class"] = per_class;
    return j.dump(2) + "\n";
}

}  // namespace crosstask
