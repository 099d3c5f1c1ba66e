#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crosstask {

/// Parallel id/text/label lists for one labeled text dataset.
struct LabeledDataset {
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    std::vector<std::string> labels;
    std::optional<std::string> domain_tag;

    size_t size() const { return ids.size(); }
    void validate() const;
};

/// {"id","text","label"} per line. label may be absent (generation-style
/// datasets); absent labels load as "".
LabeledDataset load_dataset_jsonl(const std::string& path);
void write_dataset_jsonl(const LabeledDataset& ds, const std::string& path);

/// Reassigns round(fraction * n) labels to a uniformly chosen *different*
/// label, seeded. The input is untouched. Throws kInfeasible when fewer
/// than two distinct labels exist and fraction > 0.
LabeledDataset corrupt_labels(const LabeledDataset& ds, double fraction, uint64_t seed);

/// Fixed-dimension real vectors keyed by example id.
struct EmbeddingSet {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> vectors;
    size_t dim = 0;

    size_t size() const { return ids.size(); }
    void validate() const;  // dims consistent, entries finite
};

/// {"id","vector":[...]} per line.
EmbeddingSet load_embeddings_jsonl(const std::string& path);
void write_embeddings_jsonl(const EmbeddingSet& set, const std::string& path);

}  // namespace crosstask
