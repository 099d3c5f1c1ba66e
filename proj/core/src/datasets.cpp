#include "crosstask/datasets.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"
#include "crosstask/rng.hpp"

namespace crosstask {

using json = nlohmann::json;

void LabeledDataset::validate() const {
    if (texts.size() != ids.size() || labels.size() != ids.size())
        fail(ErrorCode::kSchema, "dataset id/text/label lists differ in length");
}

LabeledDataset load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open dataset: " + path);
    LabeledDataset ds;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, "dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("id") || !j.contains("text"))
            fail(ErrorCode::kSchema,
                 "dataset line " + std::to_string(line_no) + ": need id and text");
        ds.ids.push_back(j["id"].get<std::string>());
        ds.texts.push_back(j["text"].get<std::string>());
        ds.labels.push_back(j.value("label", std::string()));
    }
    ds.validate();
    return ds;
}

void write_dataset_jsonl(const LabeledDataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write dataset: " + path);
    for (size_t i = 0; i < ds.size(); ++i) {
        json j;
        j["id"] = ds.ids[i];
        j["text"] = ds.texts[i];
        if (!ds.labels[i].empty()) j["label"] = ds.labels[i];
        out << j.dump() << '\n';
    }
}

LabeledDataset corrupt_labels(const LabeledDataset& ds, double fraction, uint64_t seed) {
    ds.validate();
    if (fraction < 0.0 || fraction > 1.0)
        fail(ErrorCode::kArgument, "fraction must be in [0, 1]");

    std::set<std::string> distinct(ds.labels.begin(), ds.labels.end());
    const auto n_changed = static_cast<size_t>(std::llround(fraction * static_cast<double>(ds.size())));
    if (n_changed > 0 && distinct.size() < 2)
        fail(ErrorCode::kInfeasible, "cannot mislabel a single-class dataset");

    LabeledDataset out = ds;
    if (n_changed == 0) return out;

    std::vector<std::string> pool(distinct.begin(), distinct.end());
    std::mt19937_64 gen(seed);
    auto victims = rng::sample_without_replacement(ds.size(), n_changed, gen);
    for (size_t idx : victims) {
        // Uniform over the labels other than the original one.
        size_t pick = static_cast<size_t>(rng::bounded(gen, pool.size() - 1));
        size_t original = 0;
        while (pool[original] != ds.labels[idx]) ++original;
        if (pick >= original) ++pick;
        out.labels[idx] = pool[pick];
    }
    return out;
}

void EmbeddingSet::validate() const {
    if (ids.size() != vectors.size())
        fail(ErrorCode::kSchema, "embedding id/vector lists differ in length");
    for (const auto& v : vectors) {
        if (v.size() != dim) fail(ErrorCode::kSchema, "embedding vector with wrong dimension");
        for (double x : v)
            if (!std::isfinite(x)) fail(ErrorCode::kSchema, "non-finite embedding entry");
    }
}

EmbeddingSet load_embeddings_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open embeddings: " + path);
    EmbeddingSet set;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, "embeddings line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("id") || !j.contains("vector") || !j["vector"].is_array())
            fail(ErrorCode::kSchema,
                 "embeddings line " + std::to_string(line_no) + ": need id and vector array");
        set.ids.push_back(j["id"].get<std::string>());
        set.vectors.push_back(j["vector"].get<std::vector<double>>());
        if (set.vectors.size() == 1) set.dim = set.vectors.back().size();
    }
    set.validate();
    return set;
}

void write_embeddings_jsonl(const EmbeddingSet& set, const std::string& path) {
    set.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write embeddings: " + path);
    for (size_t i = 0; i < set.size(); ++i) {
        json j;
        j["id"] = set.ids[i];
        j["vector"] = set.vectors[i];
        out << j.dump() << '\n';
    }
}

}  // namespace crosstask
