#include <doctest.h>

#include <cmath>
#include <map>

#include "crosstask/conllu.hpp"
#include "crosstask/errors.hpp"
#include "crosstask/lingfeat.hpp"

#include "helpers.hpp"

using namespace crosstask;

TEST_CASE("extract_math_features") {
    const auto lex = Lexicons::defaults();
    SUBCASE("empty text gives all-zero features") {
        auto f = extract_math_features("", lex);
        CHECK(f.num_values == 0);
        CHECK(f.num_questions == 0);
        CHECK(f.num_sentences == 0);
        CHECK(f.num_entities == 0);
        CHECK(f.step_count == 0);
        CHECK_FALSE(f.has_comparison);
        CHECK_FALSE(f.has_unit_conversion);
    }
    SUBCASE("apples problem: 2 values, 1 question, 3 sentences") {
        auto f = extract_math_features("John has 3 apples. He buys 2 more. How many now?", lex);
        CHECK(f.num_values == 2);
        CHECK(f.num_questions == 1);
        CHECK(f.num_sentences == 3);
        CHECK(f.num_entities == 0);  // John/He/How are sentence-initial
        CHECK(f.num_operations == 1);  // "more"
        CHECK(f.num_comparisons == 0);  // "more" alone is not "more than"
        CHECK(f.step_count == 5);  // 1 + 3 + 1 + 0 + 0
    }
    SUBCASE("conversion problem: comparison, conversion and 3 values") {
        auto f = extract_math_features("If x is more than 1,000, convert 2 km to m.", lex);
        CHECK(f.has_comparison);
        CHECK(f.has_unit_conversion);
        // Digit-run literals: "1", "000", "2" (comma groups count per run).
        CHECK(f.num_values == 3);
        CHECK(f.num_conditionals == 1);
        CHECK(f.num_sentences == 1);
    }
    SUBCASE("entities are capitalized non-sentence-initial tokens") {
        auto f = extract_math_features("Yesterday Mary met Bob. They greeted Alice.", lex);
        CHECK(f.num_entities == 3);  // Mary, Bob, Alice (Yesterday and They are initial)
    }
    SUBCASE("keyword matching respects word boundaries and case") {
        auto f = extract_math_features("IF halfway is informal, halving is fine.", lex);
        CHECK(f.num_conditionals == 1);   // "IF" matches case-insensitively
        CHECK(f.num_comparisons == 0);    // "halfway"/"halving" do not match "half"
        auto g = extract_math_features("Half of it, if you please.", lex);
        CHECK(g.num_comparisons == 1);
        CHECK(g.num_conditionals == 1);
    }
    SUBCASE("decimals count once") {
        auto f = extract_math_features("Pay 3.50 for 2 items.", lex);
        CHECK(f.num_values == 2);
    }
}

TEST_CASE("step_count is the five-term sum") {
    MathFeatures f;
    CHECK(step_count(f) == 0);
    f.num_questions = 1;
    f.num_sentences = 3;
    f.num_operations = 1;
    CHECK(step_count(f) == 5);
    f.num_comparisons = 2;
    f.num_conditionals = 1;
    CHECK(step_count(f) == 8);
}

TEST_CASE("step histogram matches an independent recount on a fixture set") {
    const auto lex = Lexicons::defaults();
    // Controlled texts whose counts are recomputed by simple character
    // scans rather than the extractor's machinery.
    const std::vector<std::string> problems = {
        "Sam buys 4 pens. Each pen costs 2 dollars. How much in total?",
        "A tank holds 100 liters. If it leaks, how long until empty?",
        "Count to 10.",
        "Is 7 more than 5? Is 5 less than 7?",
        "Split 12 candies per child. How many children?",
        "The sum of 1 and 2 and 3.",
        "When the bell rings, 30 students leave. 5 stay.",
        "Twice as many arrive. What is the total now?",
        "No numbers here at all.",
        "Divide 40 by 8. Then divide again.",
        "If you convert 3 km to m, what do you get?",
        "He ran 5 laps. She ran 6. Who ran more laps in total time?",
    };
    std::map<int, int> histogram;
    for (const auto& text : problems) ++histogram[extract_math_features(text, lex).step_count];

    std::map<int, int> recount;
    for (const auto& text : problems) {
        // Questions: '?' runs.
        int questions = 0;
        bool in_q = false;
        for (char c : text) {
            if (c == '?' && !in_q) ++questions;
            in_q = c == '?';
        }
        // Sentences: segments cut where a terminator run is followed by
        // whitespace or end of text; a segment counts if it has content.
        int sentences = 0;
        {
            auto is_term = [](char c) { return c == '.' || c == '?' || c == '!'; };
            auto has_content = [&](size_t from, size_t to) {
                for (size_t k = from; k < to; ++k)
                    if (!std::isspace(static_cast<unsigned char>(text[k]))) return true;
                return false;
            };
            size_t seg_start = 0, i = 0;
            while (i < text.size()) {
                if (is_term(text[i])) {
                    size_t j = i;
                    while (j < text.size() && is_term(text[j])) ++j;
                    if (j == text.size() || std::isspace(static_cast<unsigned char>(text[j]))) {
                        if (has_content(seg_start, j)) ++sentences;
                        seg_start = j;
                    }
                    i = j;
                } else {
                    ++i;
                }
            }
            if (has_content(seg_start, text.size())) ++sentences;
        }
        // Keyword tallies with a plain find loop.
        auto lower = text;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        auto count_words = [&](const std::vector<std::string>& words) {
            int n = 0;
            for (const auto& w : words) {
                size_t pos = 0;
                while ((pos = lower.find(w, pos)) != std::string::npos) {
                    const bool l = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
                    const bool r = pos + w.size() == lower.size() ||
                                   !std::isalnum(static_cast<unsigned char>(lower[pos + w.size()]));
                    if (l && r) {
                        ++n;
                        pos += w.size();
                    } else {
                        ++pos;
                    }
                }
            }
            return n;
        };
        const int ops = count_words(lex.operations);
        const int cmps = count_words(lex.comparisons);
        const int conds = count_words(lex.conditionals);
        ++recount[questions + sentences + ops + cmps + conds];
    }
    CHECK(histogram == recount);
}

TEST_CASE("operation_tags") {
    SUBCASE("single operator") {
        CHECK(operation_tags("<<3+2=5>>") == std::set<OpTag>{OpTag::kAdd});
    }
    SUBCASE("two expressions") {
        CHECK(operation_tags("<<8/2=4>> then <<4-1=3>>") ==
              std::set<OpTag>{OpTag::kDiv, OpTag::kSub});
    }
    SUBCASE("spaces around the operator are tolerated") {
        CHECK(operation_tags("12 * 3 = 36") == std::set<OpTag>{OpTag::kMul});
    }
    SUBCASE("hyphens between words are not subtraction") {
        CHECK(operation_tags("a well-known fact").empty());
    }
    SUBCASE("20-solution fixture matches a manual operator scan") {
        const std::vector<std::pair<std::string, std::set<OpTag>>> fixture = {
            {"<<1+1=2>>", {OpTag::kAdd}},
            {"<<4-2=2>>", {OpTag::kSub}},
            {"<<3*3=9>>", {OpTag::kMul}},
            {"<<8/4=2>>", {OpTag::kDiv}},
            {"<<1+2=3>> and <<3-1=2>>", {OpTag::kAdd, OpTag::kSub}},
            {"<<2*3=6>> so <<6/2=3>>", {OpTag::kMul, OpTag::kDiv}},
            {"first <<5+5=10>> then <<10*2=20>>", {OpTag::kAdd, OpTag::kMul}},
            {"9 - 3 = 6", {OpTag::kSub}},
            {"7 + 1 = 8", {OpTag::kAdd}},
            {"30 / 5 = 6", {OpTag::kDiv}},
            {"6*7=42", {OpTag::kMul}},
            {"no math at all", {}},
            {"dash-separated words only", {}},
            {"<<10-4=6>> minus again <<6-6=0>>", {OpTag::kSub}},
            {"half of 8 is 8/2", {OpTag::kDiv}},
            {"sum: 2+2", {OpTag::kAdd}},
            {"<<9*9=81>>", {OpTag::kMul}},
            {"<<81/9=9>>", {OpTag::kDiv}},
            {"1+1 then 2*2 then 3-3 then 4/4",
             {OpTag::kAdd, OpTag::kMul, OpTag::kSub, OpTag::kDiv}},
            {"totals without operators", {}},
        };
        std::map<OpTag, int> per_tag_expected, per_tag_got;
        for (const auto& [text, expected] : fixture) {
            CHECK(operation_tags(text) == expected);
            for (OpTag t : expected) ++per_tag_expected[t];
            for (OpTag t : operation_tags(text)) ++per_tag_got[t];
        }
        CHECK(per_tag_got == per_tag_expected);
    }
}

TEST_CASE("feature_improvement_correlation") {
    const auto lex = Lexicons::defaults();
    SUBCASE("constant improvement makes every correlation undefined") {
        std::vector<MathFeatures> features;
        for (int i = 0; i < 5; ++i)
            features.push_back(extract_math_features("Count " + std::to_string(i), lex));
        std::vector<int> base = {0, 0, 0, 0, 0}, adapter = {1, 1, 1, 1, 1};
        for (const auto& [name, corr] : feature_improvement_correlation(features, base, adapter))
            CHECK_FALSE(corr.has_value());
    }
    SUBCASE("a feature equal to the improvement vector correlates perfectly") {
        // num_questions tracks improvement exactly: 0/1 question marks.
        std::vector<MathFeatures> features;
        std::vector<int> base(6, 0), adapter;
        for (int i = 0; i < 6; ++i) {
            const bool improved = i % 2 == 0;
            adapter.push_back(improved ? 1 : 0);
            features.push_back(extract_math_features(improved ? "why?" : "why", lex));
        }
        auto out = feature_improvement_correlation(features, base, adapter);
        CHECK(out.at("num_questions").value() == doctest::Approx(1.0));
    }
    SUBCASE("matches a naive covariance oracle on a 50-problem fixture") {
        std::mt19937_64 gen(2024);
        std::vector<MathFeatures> features;
        std::vector<int> base, adapter;
        for (int i = 0; i < 50; ++i) {
            std::string text;
            const auto values = rng::bounded(gen, 6);
            for (uint64_t v = 0; v < values; ++v) text += std::to_string(v) + " plus ";
            if (rng::bounded(gen, 2)) text += "How many?";
            else text += "Total.";
            features.push_back(extract_math_features(text, lex));
            base.push_back(static_cast<int>(rng::bounded(gen, 2)));
            adapter.push_back(static_cast<int>(rng::bounded(gen, 2)));
        }
        auto out = feature_improvement_correlation(features, base, adapter);

        auto naive = [&](auto getter) -> std::optional<double> {
            const double n = 50;
            double mx = 0, my = 0;
            for (int i = 0; i < 50; ++i) {
                mx += getter(features[static_cast<size_t>(i)]);
                my += adapter[static_cast<size_t>(i)] - base[static_cast<size_t>(i)];
            }
            mx /= n;
            my /= n;
            double sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < 50; ++i) {
                const double dx = getter(features[static_cast<size_t>(i)]) - mx;
                const double dy =
                    (adapter[static_cast<size_t>(i)] - base[static_cast<size_t>(i)]) - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
            if (sxx == 0 || syy == 0) return std::nullopt;
            return sxy / (std::sqrt(sxx) * std::sqrt(syy));
        };
        auto expect_values = naive([](const MathFeatures& f) { return double(f.num_values); });
        auto expect_questions =
            naive([](const MathFeatures& f) { return double(f.num_questions); });
        REQUIRE(out.at("num_values").has_value() == expect_values.has_value());
        if (expect_values) CHECK(*out.at("num_values") == doctest::Approx(*expect_values).epsilon(1e-12));
        if (expect_questions)
            CHECK(*out.at("num_questions") == doctest::Approx(*expect_questions).epsilon(1e-12));
        for (const auto& [name, corr] : out)
            if (corr) {
                CHECK(*corr >= -1.0 - 1e-12);
                CHECK(*corr <= 1.0 + 1e-12);
            }
    }
    SUBCASE("length mismatch is a schema error") {
        std::vector<MathFeatures> features(3);
        std::vector<int> base(3, 0), adapter(2, 1);
        CHECK_THROWS_AS(feature_improvement_correlation(features, base, adapter), Error);
    }
}

TEST_CASE("relation_importance") {
    auto sentences = conllu::load_conllu(testutil::test_data_dir() + "/problems_10.conllu");
    auto docs = conllu::group_by_document(sentences);
    REQUIRE(docs.size() == 10);
    std::vector<std::vector<conllu::Sentence>> problems;
    for (const auto& d : docs) problems.push_back(d.sentences);

    const std::vector<int> base = {1, 0, 1, 0, 0, 1, 0, 1, 0, 0};
    const std::vector<int> adapter = {1, 1, 1, 0, 1, 1, 0, 1, 1, 0};

    SUBCASE("identical score vectors give ratio 1 everywhere defined") {
        auto table = relation_importance(problems, base, base, ImportanceKey::kDeprel);
        for (const auto& [key, row] : table.rows) {
            CHECK(row.adapter_success == row.base_success);
            if (row.base_success > 0) CHECK(*row.ratio == doctest::Approx(1.0));
            else CHECK_FALSE(row.ratio.has_value());
        }
    }
    SUBCASE("oprd appears only in base-failed problems: undefined ratio") {
        auto table = relation_importance(problems, base, adapter, ImportanceKey::kDeprel);
        const auto& oprd = table.rows.at("oprd");
        CHECK(oprd.base_success == 0);
        CHECK(oprd.adapter_success == 3);
        CHECK_FALSE(oprd.ratio.has_value());
    }
    SUBCASE("table equals an exhaustive hand tally") {
        auto table = relation_importance(problems, base, adapter, ImportanceKey::kDeprel);
        // Independent tally: for every problem and key value, recount.
        std::map<std::string, std::pair<size_t, size_t>> tally;  // adapter, base
        for (size_t i = 0; i < problems.size(); ++i) {
            std::set<std::string> seen;
            for (const auto& s : problems[i])
                for (const auto& t : s.tokens) seen.insert(t.deprel);
            for (const auto& k : seen) {
                if (adapter[i] == 1) ++tally[k].first;
                if (base[i] == 1) ++tally[k].second;
            }
        }
        REQUIRE(table.rows.size() == tally.size());
        for (const auto& [key, expected] : tally) {
            const auto& row = table.rows.at(key);
            CHECK(row.adapter_success == expected.first);
            CHECK(row.base_success == expected.second);
            CHECK(row.adapter_success <= problems.size());
            if (expected.second > 0)
                CHECK(*row.ratio == doctest::Approx(double(expected.first) / double(expected.second)));
        }
    }
    SUBCASE("upos key works the same way") {
        auto table = relation_importance(problems, base, adapter, ImportanceKey::kUpos);
        CHECK(table.rows.count("NUM") == 1);
        CHECK(table.key == "upos");
    }
    SUBCASE("length mismatch is a schema error") {
        std::vector<int> short_scores = {1};
        CHECK_THROWS_AS(relation_importance(problems, short_scores, adapter, ImportanceKey::kDeprel),
                        Error);
    }
}

TEST_CASE("lexicon monotonicity: adding a keyword never lowers its count") {
    const std::vector<std::string> texts = {
        "John has 3 apples. He buys 2 more. How many now?",
        "If x is more than 1,000, convert 2 km to m.",
        "Split the total per child, if possible, when ready.",
    };
    auto lex = Lexicons::defaults();
    auto grown = lex;
    grown.operations.push_back("buys");
    grown.conditionals.push_back("possible");
    for (const auto& text : texts) {
        auto before = extract_math_features(text, lex);
        auto after = extract_math_features(text, grown);
        CHECK(after.num_operations >= before.num_operations);
        CHECK(after.num_conditionals >= before.num_conditionals);
    }
}

TEST_CASE("bundled lexicon file matches the built-in defaults") {
    auto bundled = Lexicons::load(testutil::data_dir() + "/lexicons.json");
    auto defaults = Lexicons::defaults();
    CHECK(bundled.comparisons == defaults.comparisons);
    CHECK(bundled.conditionals == defaults.conditionals);
    CHECK(bundled.conversion_keywords == defaults.conversion_keywords);
    CHECK(bundled.unit_pairs == defaults.unit_pairs);
    CHECK(bundled.operations == defaults.operations);
}
