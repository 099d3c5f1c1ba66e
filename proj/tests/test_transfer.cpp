#include <doctest.h>

#include <cmath>

#include "crosstask/errors.hpp"
#include "crosstask/transfer.hpp"

#include "helpers.hpp"

using namespace crosstask;

namespace {

GainMatrix paper_gains() {
    auto m = load_matrix_csv(testutil::data_dir() + "/paper_matrix.csv");
    return gain_matrix(m);
}

AliasMap paper_aliases() { return AliasMap::load(testutil::data_dir() + "/aliases.json"); }

}  // namespace

TEST_CASE("gain matrix reproduces the paper's deltas") {
    auto g = paper_gains();
    CHECK(g.at(g.row_index("Magicoder"), g.col_index("GSM8K")) == doctest::Approx(9.40));
    CHECK(g.at(g.row_index("MetaMath"), g.col_index("Magicoder")) == doctest::Approx(-1.05));
    CHECK(g.at(g.row_index("MetaMath"), g.col_index("Flipkart")) == doctest::Approx(-17.45));
    CHECK(g.baseline_label == "None");
    CHECK(g.rows() == 10);  // baseline row removed
}

TEST_CASE("gains plus baseline reproduce the original matrix") {
    auto m = load_matrix_csv(testutil::data_dir() + "/paper_matrix.csv");
    auto g = gain_matrix(m);
    for (size_t r = 0; r < g.rows(); ++r)
        for (size_t c = 0; c < g.cols(); ++c) {
            const double rebuilt = g.at(r, c) + g.baseline_values[c];
            CHECK(std::abs(rebuilt - m.at(m.row_index(g.row_labels[r]), c)) <= 0.005);
        }
}

TEST_CASE("missing baseline row is a configuration error") {
    PerformanceMatrix m;
    m.row_labels = {"a", "b"};
    m.col_labels = {"t"};
    m.values = {1.0, 2.0};
    CHECK_THROWS_AS(gain_matrix(m), Error);
}

TEST_CASE("asymmetry on the paper matrix") {
    auto pairs = asymmetry(paper_gains(), paper_aliases());

    auto find = [&](const std::string& a, const std::string& b) -> const AsymmetryEntry& {
        for (const auto& e : pairs)
            if (e.dataset_a == a && e.dataset_b == b) return e;
        FAIL("missing pair ", a, " / ", b);
        static AsymmetryEntry dummy;
        return dummy;
    };

    SUBCASE("code <-> math pair carries +9.40 and -1.05") {
        const auto& e = find("Magicoder", "MetaMath");
        CHECK(e.gain_ab == doctest::Approx(9.40));    // Magicoder -> GSM8K column
        CHECK(*e.gain_ba == doctest::Approx(-1.05));  // MetaMath -> Magicoder column
        CHECK(std::abs(*e.asymmetry) == doctest::Approx(10.45));
    }
    SUBCASE("sentiment -> math pairs") {
        CHECK(find("Flipkart", "MetaMath").gain_ab == doctest::Approx(4.81));
        CHECK(*find("Flipkart", "MetaMath").gain_ba == doctest::Approx(-17.45));
        CHECK(find("Amazon", "MetaMath").gain_ab == doctest::Approx(3.19));
        CHECK(find("IMDB", "MetaMath").gain_ab == doctest::Approx(3.00));
    }
    SUBCASE("asymmetry is antisymmetric by construction") {
        for (const auto& e : pairs)
            if (e.asymmetry) CHECK(*e.asymmetry == doctest::Approx(e.gain_ab - *e.gain_ba));
    }
    SUBCASE("MNLI column (no source row) appears one-sided, not dropped") {
        size_t one_sided = 0;
        for (const auto& e : pairs)
            if (!e.gain_ba) {
                CHECK(e.dataset_b == "MNLI");
                ++one_sided;
            }
        CHECK(one_sided == 9);  // one per resolved source row
    }
    SUBCASE("equal gains both ways give zero asymmetry") {
        GainMatrix g;
        g.row_labels = {"A", "B"};
        g.col_labels = {"A", "B"};
        g.values = {0.0, 5.0, 5.0, 0.0};
        g.baseline_label = "None";
        g.baseline_values = {0.0, 0.0};
        AliasMap identity;
        auto symmetric = asymmetry(g, identity);
        REQUIRE(symmetric.size() == 1);
        CHECK(*symmetric[0].asymmetry == doctest::Approx(0.0));
    }
}

TEST_CASE("unresolvable source row is a configuration error naming the orphan") {
    GainMatrix g;
    g.row_labels = {"Mystery"};
    g.col_labels = {"taskX"};
    g.values = {1.0};
    g.baseline_label = "None";
    g.baseline_values = {0.0};
    AliasMap empty;
    try {
        asymmetry(g, empty);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kConfig);
        CHECK(std::string(e.what()).find("Mystery") != std::string::npos);
    }
}

TEST_CASE("row_diff") {
    SUBCASE("Amazon-mislabeled vs Amazon reproduces the paper's deltas") {
        auto m = load_matrix_csv(testutil::data_dir() + "/table6_matrix.csv");
        auto deltas = row_diff(m, "Amazon-mislabeled", "Amazon");
        std::map<std::string, double> by_col(deltas.begin(), deltas.end());
        CHECK(std::lround(by_col.at("GSM8K") * 100) == 68);   // +0.68 at 2-decimal precision
        CHECK(std::lround(by_col.at("IMDB") * 100) == 15);    // +0.15
        CHECK(std::lround(by_col.at("Flipkart") * 100) == 90);
    }
    SUBCASE("self diff is identically zero") {
        auto m = load_matrix_csv(testutil::data_dir() + "/paper_matrix.csv");
        for (const auto& [col, d] : row_diff(m, "Flipkart", "Flipkart")) CHECK(d == 0.0);
    }
    SUBCASE("balanced vs imbalanced Flipkart on the Pile column") {
        auto m = load_matrix_csv(testutil::data_dir() + "/imbalance_matrix.csv");
        auto deltas = row_diff(m, "Flipkart-bal.", "Flipkart-imb.");
        std::map<std::string, double> by_col(deltas.begin(), deltas.end());
        CHECK(by_col.at("Pile") == doctest::Approx(10.95));
    }
    SUBCASE("unknown label is a lookup error") {
        auto m = load_matrix_csv(testutil::data_dir() + "/table6_matrix.csv");
        CHECK_THROWS_AS(row_diff(m, "Amazon", "nope"), Error);
    }
}

TEST_CASE("quadrant categorization") {
    auto make_profile = [](const std::string& name, std::vector<std::string> texts,
                           std::vector<std::string> labels) {
        return profile_dataset(name, texts, labels);
    };
    const std::vector<std::string> short_texts = {"a b", "c d", "e f", "g h"};
    const std::vector<std::string> long_texts = {
        "a b c d e f g h i j k l", "m n o p q r s t u v w x", "a a a a a a a a a a a a",
        "b b b b b b b b b b b b"};
    const std::vector<std::string> binary = {"x", "y", "x", "y"};

    SUBCASE("identical profiles with different domains land in different-domain/similar-stats") {
        std::map<std::string, DatasetProfile> profiles;
        profiles["src"] = make_profile("src", short_texts, binary);
        profiles["tgt"] = make_profile("tgt", short_texts, binary);
        std::map<std::string, std::string> domains{{"src", "alpha"}, {"tgt", "beta"}};

        GainMatrix g;
        g.row_labels = {"src"};
        g.col_labels = {"tgt"};
        g.values = {1.5};
        g.baseline_label = "None";
        g.baseline_values = {0.0};
        auto table = categorize_pairs(g, profiles, domains, 0.2, 0.2);
        REQUIRE(table.entries.size() == 1);
        CHECK(table.entries[0].domain == DomainMatch::kDifferent);
        CHECK(table.entries[0].stats == StatsMatch::kSimilar);
        CHECK(table.entries[0].ks == doctest::Approx(0.0));
    }
    SUBCASE("disjoint length supports give KS = 1 and different stats") {
        std::map<std::string, DatasetProfile> profiles;
        profiles["src"] = make_profile("src", short_texts, binary);
        profiles["tgt"] = make_profile("tgt", long_texts, binary);
        std::map<std::string, std::string> domains{{"src", "alpha"}, {"tgt", "alpha"}};

        GainMatrix g;
        g.row_labels = {"src"};
        g.col_labels = {"tgt"};
        g.values = {-3.0};
        g.baseline_label = "None";
        g.baseline_values = {0.0};
        auto table = categorize_pairs(g, profiles, domains, 0.2, 0.2);
        CHECK(table.entries[0].ks == doctest::Approx(1.0));
        CHECK(table.entries[0].stats == StatsMatch::kDifferent);
        CHECK(table.entries[0].domain == DomainMatch::kSame);
    }
    SUBCASE("the paper's in-domain IMDB cell: same domain, similar stats, +40.00") {
        auto m = load_matrix_csv(testutil::data_dir() + "/paper_matrix.csv");
        auto g = gain_matrix(m);
        // One-row slice so only profiles for IMDB are needed.
        GainMatrix slice;
        slice.row_labels = {"IMDB"};
        slice.col_labels = {"IMDB"};
        slice.values = {g.at(g.row_index("IMDB"), g.col_index("IMDB"))};
        slice.baseline_label = g.baseline_label;
        slice.baseline_values = {g.baseline_values[g.col_index("IMDB")]};

        std::map<std::string, DatasetProfile> profiles;
        profiles["IMDB"] = make_profile("IMDB", long_texts, binary);
        std::map<std::string, std::string> domains{{"IMDB", "sentiment"}};
        auto table = categorize_pairs(slice, profiles, domains, 0.2, 0.2);
        REQUIRE(table.entries.size() == 1);
        CHECK(table.entries[0].gain == doctest::Approx(40.00));
        CHECK(table.entries[0].domain == DomainMatch::kSame);
        CHECK(table.entries[0].stats == StatsMatch::kSimilar);
        CHECK(table.count(DomainMatch::kSame, StatsMatch::kSimilar) == 1);
    }
    SUBCASE("missing profile is a lookup error") {
        GainMatrix g;
        g.row_labels = {"src"};
        g.col_labels = {"tgt"};
        g.values = {0.0};
        g.baseline_label = "None";
        g.baseline_values = {0.0};
        std::map<std::string, DatasetProfile> profiles;
        std::map<std::string, std::string> domains;
        CHECK_THROWS_AS(categorize_pairs(g, profiles, domains, 0.2, 0.2), Error);
    }
}
