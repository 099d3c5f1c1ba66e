#pragma once

#include <map>
#include <string>
#include <vector>

#include "crosstask/datasets.hpp"

namespace crosstask {

enum class SimilarityKind { kSemantic, kStylistic };

const char* to_string(SimilarityKind k);

/// Arithmetic per-dimension mean, L2-normalized. Throws kNumeric when
/// the mean has zero norm.
std::vector<double> centroid(const EmbeddingSet& set);

/// Cosine of the two centroids, in [-1, 1]. Dims must agree.
double dataset_similarity(const EmbeddingSet& a, const EmbeddingSet& b);

struct SimilarityMatrix {
    std::vector<std::string> labels;
    std::vector<double> values;  // symmetric, unit diagonal
    SimilarityKind kind = SimilarityKind::kSemantic;

    size_t size() const { return labels.size(); }
    double at(size_t i, size_t j) const { return values[i * labels.size() + j]; }
};

/// Each unordered pair computed once, mirrored into both cells.
SimilarityMatrix similarity_matrix(const std::map<std::string, EmbeddingSet>& sets,
                                   SimilarityKind kind);

std::string similarity_to_json(const SimilarityMatrix& m);

}  // namespace crosstask
