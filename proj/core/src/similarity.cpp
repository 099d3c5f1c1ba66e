#include "crosstask/similarity.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

const char* to_string(SimilarityKind k) {
    return k == SimilarityKind::kSemantic ? "semantic" : "stylistic";
}

std::vector<double> centroid(const EmbeddingSet& set) {
    set.validate();
    if (set.size() == 0) fail(ErrorCode::kEmptyInput, "centroid of empty embedding set");

    std::vector<double> mean(set.dim, 0.0);
    for (const auto& v : set.vectors)
        for (size_t d = 0; d < set.dim; ++d) mean[d] += v[d];
    for (double& x : mean) x /= static_cast<double>(set.size());

    double norm_sq = 0;
    for (double x : mean) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0) fail(ErrorCode::kNumeric, "degenerate embeddings: zero-norm centroid");
    for (double& x : mean) x /= norm;
    return mean;
}

double dataset_similarity(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dim != b.dim)
        fail(ErrorCode::kSchema, "embedding dimension mismatch: " + std::to_string(a.dim) +
                                     " vs " + std::to_string(b.dim));
    const auto ca = centroid(a);
    const auto cb = centroid(b);
    double dot = 0;
    for (size_t d = 0; d < ca.size(); ++d) dot += ca[d] * cb[d];
    // Centroids are unit vectors; clamp residual rounding.
    return std::clamp(dot, -1.0, 1.0);
}

SimilarityMatrix similarity_matrix(const std::map<std::string, EmbeddingSet>& sets,
                                   SimilarityKind kind) {
    if (sets.size() < 2)
        fail(ErrorCode::kArgument, "similarity matrix needs at least two datasets");

    SimilarityMatrix m;
    m.kind = kind;
    for (const auto& [label, _] : sets) m.labels.push_back(label);
    const size_t n = m.labels.size();
    m.values.assign(n * n, 0.0);

    std::vector<std::vector<double>> centroids;
    centroids.reserve(n);
    size_t dim = sets.begin()->second.dim;
    for (const auto& [label, set] : sets) {
        if (set.dim != dim)
            fail(ErrorCode::kSchema, "embedding dimension mismatch for dataset: " + label);
        try {
            centroids.push_back(centroid(set));
        } catch (const Error& e) {
            fail(e.code(), "dataset '" + label + "': " + e.what());
        }
    }

    for (size_t i = 0; i < n; ++i) {
        m.values[i * n + i] = 1.0;
        for (size_t j = i + 1; j < n; ++j) {
            double dot = 0;
            for (size_t d = 0; d < dim; ++d) dot += centroids[i][d] * centroids[j][d];
            dot = std::clamp(dot, -1.0, 1.0);
            m.values[i * n + j] = dot;
            m.values[j * n + i] = dot;
        }
    }
    return m;
}

std::string similarity_to_json(const SimilarityMatrix& m) {
    json j;
    j["kind"] = "similarity_matrix";
    j["similarity_kind"] = to_string(m.kind);
    j["labels"] = m.labels;
    json rows = json::array();
    for (size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (size_t k = 0; k < m.size(); ++k) row.push_back(m.at(i, k));
        rows.push_back(std::move(row));
    }
    j["values"] = rows;
    return j.dump(2) + "\n";
}

}  // namespace crosstask
