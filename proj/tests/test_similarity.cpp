#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crosstask/errors.hpp"
#include "crosstask/matrix.hpp"
#include "crosstask/similarity.hpp"
#include "crosstask/transfer.hpp"

#include "helpers.hpp"

using namespace crosstask;

namespace {

EmbeddingSet make_set(std::vector<std::vector<double>> vectors) {
    EmbeddingSet set;
    set.dim = vectors.empty() ? 0 : vectors[0].size();
    for (size_t i = 0; i < vectors.size(); ++i) set.ids.push_back(std::to_string(i));
    set.vectors = std::move(vectors);
    return set;
}

/// A cloud of vectors whose mean direction is `angle_rad` off the x axis.
EmbeddingSet cloud_at_angle(double angle_rad, size_t count, uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::vector<double>> vectors;
    for (size_t i = 0; i < count; ++i) {
        const double jitter =
            (static_cast<double>(rng::bounded(gen, 1000)) / 1000.0 - 0.5) * 1e-3;
        vectors.push_back({std::cos(angle_rad) + jitter, std::sin(angle_rad) - jitter});
    }
    return make_set(std::move(vectors));
}

}  // namespace

TEST_CASE("centroid") {
    SUBCASE("single vector is its own (normalized) centroid") {
        auto c = centroid(make_set({{0.0, 1.0}}));
        CHECK(c[0] == doctest::Approx(0.0));
        CHECK(c[1] == doctest::Approx(1.0));
    }
    SUBCASE("symmetric pair averages to the diagonal") {
        auto c = centroid(make_set({{1.0, 0.0}, {0.0, 1.0}}));
        CHECK(c[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(c[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("50-vector fixture equals the naive per-dimension loop") {
        std::mt19937_64 gen(31);
        std::vector<std::vector<double>> vectors;
        for (int i = 0; i < 50; ++i) {
            std::vector<double> v(6);
            for (auto& x : v) x = static_cast<double>(rng::bounded(gen, 2000)) / 100.0 - 10.0;
            vectors.push_back(v);
        }
        auto set = make_set(vectors);
        auto got = centroid(set);

        std::vector<double> expected(6, 0.0);
        for (const auto& v : vectors)
            for (size_t d = 0; d < 6; ++d) expected[d] += v[d];
        for (auto& x : expected) x /= 50.0;
        double norm = 0;
        for (double x : expected) norm += x * x;
        norm = std::sqrt(norm);
        for (size_t d = 0; d < 6; ++d) CHECK(got[d] == doctest::Approx(expected[d] / norm));
    }
    SUBCASE("zero-norm centroid is a degenerate-embedding error") {
        CHECK_THROWS_AS(centroid(make_set({{1.0, 0.0}, {-1.0, 0.0}})), Error);
    }
}

TEST_CASE("dataset_similarity") {
    SUBCASE("identical sets give 1") {
        auto a = make_set({{0.3, 0.4}, {0.6, 0.8}});
        CHECK(dataset_similarity(a, a) == doctest::Approx(1.0));
    }
    SUBCASE("orthogonal centroids give 0") {
        CHECK(dataset_similarity(make_set({{1.0, 0.0}}), make_set({{0.0, 1.0}})) ==
              doctest::Approx(0.0));
    }
    SUBCASE("constructed 60-degree pair gives 0.5") {
        auto a = make_set({{1.0, 0.0}});
        auto b = make_set({{0.5, std::sqrt(3.0) / 2.0}});
        CHECK(dataset_similarity(a, b) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("dimension mismatch is a schema error") {
        CHECK_THROWS_AS(dataset_similarity(make_set({{1.0}}), make_set({{1.0, 0.0}})), Error);
    }
}

TEST_CASE("similarity_matrix") {
    SUBCASE("two identical datasets give a matrix of ones") {
        std::map<std::string, EmbeddingSet> sets;
        sets["a"] = make_set({{0.6, 0.8}});
        sets["b"] = make_set({{0.6, 0.8}});
        auto m = similarity_matrix(sets, SimilarityKind::kSemantic);
        for (double v : m.values) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("three mutually orthogonal centroids give the identity") {
        std::map<std::string, EmbeddingSet> sets;
        sets["x"] = make_set({{1.0, 0.0, 0.0}});
        sets["y"] = make_set({{0.0, 1.0, 0.0}});
        sets["z"] = make_set({{0.0, 0.0, 1.0}});
        auto m = similarity_matrix(sets, SimilarityKind::kStylistic);
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j)
                CHECK(m.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
    SUBCASE("symmetry, range and unit diagonal hold on random clouds") {
        std::map<std::string, EmbeddingSet> sets;
        sets["a"] = cloud_at_angle(0.3, 20, 1);
        sets["b"] = cloud_at_angle(1.1, 25, 2);
        sets["c"] = cloud_at_angle(2.0, 15, 3);
        auto m = similarity_matrix(sets, SimilarityKind::kSemantic);
        for (size_t i = 0; i < m.size(); ++i) {
            CHECK(m.at(i, i) == doctest::Approx(1.0));
            for (size_t j = 0; j < m.size(); ++j) {
                CHECK(std::abs(m.at(i, j) - m.at(j, i)) <= 1e-12);
                CHECK(m.at(i, j) >= -1.0);
                CHECK(m.at(i, j) <= 1.0);
            }
        }
    }
    SUBCASE("high similarity does not imply positive transfer (paper's example shape)") {
        // MNLI-like sits 15 degrees from MetaMath-like; Flipkart-like 80
        // degrees away. Transfer gains from the bundled matrix point the
        // other way around.
        std::map<std::string, EmbeddingSet> sets;
        sets["metamath_like"] = cloud_at_angle(0.0, 30, 4);
        sets["mnli_like"] = cloud_at_angle(15.0 * std::numbers::pi / 180.0, 30, 5);
        sets["flipkart_like"] = cloud_at_angle(80.0 * std::numbers::pi / 180.0, 30, 6);
        auto m = similarity_matrix(sets, SimilarityKind::kStylistic);
        const auto idx = [&](const std::string& l) {
            for (size_t i = 0; i < m.labels.size(); ++i)
                if (m.labels[i] == l) return i;
            FAIL("missing label");
            return size_t{0};
        };
        const double sim_mnli = m.at(idx("mnli_like"), idx("metamath_like"));
        const double sim_flipkart = m.at(idx("flipkart_like"), idx("metamath_like"));
        CHECK(sim_mnli > sim_flipkart);

        auto gains = gain_matrix(load_matrix_csv(testutil::data_dir() + "/paper_matrix.csv"));
        const double gain_mnli = gains.at(gains.row_index("MNLI (Eng.)"), gains.col_index("GSM8K"));
        const double gain_flipkart =
            gains.at(gains.row_index("Flipkart"), gains.col_index("GSM8K"));
        CHECK(gain_flipkart > gain_mnli);  // similarity and transfer disagree
    }
    SUBCASE("permuting dataset order permutes rows and columns identically") {
        std::map<std::string, EmbeddingSet> sets;
        sets["a"] = cloud_at_angle(0.2, 10, 7);
        sets["b"] = cloud_at_angle(0.9, 10, 8);
        sets["c"] = cloud_at_angle(1.7, 10, 9);
        auto m = similarity_matrix(sets, SimilarityKind::kSemantic);
        // Relabel so the map iterates in a different order.
        std::map<std::string, EmbeddingSet> renamed;
        renamed["z_a"] = sets["a"];
        renamed["y_b"] = sets["b"];
        renamed["x_c"] = sets["c"];  // sorted order: x_c, y_b, z_a (reverse of a, b, c)
        auto p = similarity_matrix(renamed, SimilarityKind::kSemantic);
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j)
                CHECK(p.at(i, j) == doctest::Approx(m.at(2 - i, 2 - j)).epsilon(1e-15));
    }
    SUBCASE("fewer than two datasets is an argument error") {
        std::map<std::string, EmbeddingSet> sets;
        sets["only"] = make_set({{1.0}});
        CHECK_THROWS_AS(similarity_matrix(sets, SimilarityKind::kSemantic), Error);
    }
}
