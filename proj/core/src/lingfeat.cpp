#include "crosstask/lingfeat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

Lexicons Lexicons::defaults() {
    Lexicons lex;
    lex.comparisons = {"more than", "less than", "fewer", "greater", "twice", "half", "times as"};
    lex.conditionals = {"if", "when", "unless"};
    lex.conversion_keywords = {"convert"};
    lex.unit_pairs = {{"km", "m"}, {"kg", "g"}, {"hours", "minutes"}, {"dollars", "cents"}};
    lex.operations = {"total", "sum",  "more", "fewer", "left",
                      "each",  "per",  "split", "times", "divide"};
    return lex;
}

Lexicons Lexicons::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open lexicon file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::kParse, std::string("lexicon file: ") + e.what());
    }
    Lexicons lex;
    lex.comparisons = j.at("comparisons").get<std::vector<std::string>>();
    lex.conditionals = j.at("conditionals").get<std::vector<std::string>>();
    lex.conversion_keywords = j.at("conversion_keywords").get<std::vector<std::string>>();
    for (const auto& pair : j.at("unit_pairs")) {
        if (!pair.is_array() || pair.size() != 2)
            fail(ErrorCode::kSchema, "unit_pairs entries must be [unit, unit]");
        lex.unit_pairs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    lex.operations = j.at("operations").get<std::vector<std::string>>();
    return lex;
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string lower_copy(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Non-overlapping, case-insensitive occurrences of `phrase` bounded by
/// non-word characters (or text edges). `haystack` must be lowercased.
int count_phrase(const std::string& haystack, const std::string& phrase) {
    if (phrase.empty()) return 0;
    const std::string needle = lower_copy(phrase);
    int count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) {
            ++count;
            pos = end;
        } else {
            ++pos;
        }
    }
    return count;
}

int count_lexicon(const std::string& haystack, const std::vector<std::string>& phrases) {
    int count = 0;
    for (const auto& p : phrases) count += count_phrase(haystack, p);
    return count;
}

int count_numeric_literals(std::string_view text) {
    int count = 0;
    size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++count;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i + 1 < text.size() && text[i] == '.' &&
                std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
        } else {
            ++i;
        }
    }
    return count;
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

/// Sentence spans: split on terminator runs followed by whitespace or
/// end of text; a span counts when it contains a non-space character.
std::vector<std::pair<size_t, size_t>> sentence_spans(std::string_view text) {
    std::vector<std::pair<size_t, size_t>> spans;
    size_t start = 0;
    size_t i = 0;
    auto emit = [&](size_t end) {
        for (size_t k = start; k < end; ++k) {
            if (!std::isspace(static_cast<unsigned char>(text[k]))) {
                spans.emplace_back(start, end);
                return;
            }
        }
    };
    while (i < text.size()) {
        if (is_terminator(text[i])) {
            size_t run_end = i;
            while (run_end < text.size() && is_terminator(text[run_end])) ++run_end;
            if (run_end == text.size() ||
                std::isspace(static_cast<unsigned char>(text[run_end]))) {
                emit(run_end);
                start = run_end;
            }
            i = run_end;
        } else {
            ++i;
        }
    }
    emit(text.size());
    return spans;
}

int count_question_runs(std::string_view text) {
    int count = 0;
    bool in_run = false;
    for (char c : text) {
        if (c == '?' && !in_run) ++count;
        in_run = c == '?';
    }
    return count;
}

int count_entities(std::string_view text, const std::vector<std::pair<size_t, size_t>>& spans) {
    int count = 0;
    for (const auto& [begin, end] : spans) {
        bool first_token = true;
        size_t i = begin;
        while (i < end) {
            while (i < end && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            if (i >= end) break;
            size_t tok_start = i;
            while (i < end && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            // Strip surrounding punctuation before the capitalization check.
            size_t a = tok_start, b = i;
            while (a < b && !is_word_char(text[a])) ++a;
            while (b > a && !is_word_char(text[b - 1])) --b;
            if (a < b) {
                if (!first_token && std::isupper(static_cast<unsigned char>(text[a]))) ++count;
                first_token = false;
            }
        }
    }
    return count;
}

bool has_unit_pair(const std::string& haystack,
                   const std::vector<std::pair<std::string, std::string>>& pairs) {
    for (const auto& [a, b] : pairs)
        if (count_phrase(haystack, a) > 0 && count_phrase(haystack, b) > 0) return true;
    return false;
}

}  // namespace

MathFeatures extract_math_features(std::string_view text, const Lexicons& lex) {
    MathFeatures f;
    const std::string lowered = lower_copy(text);
    const auto spans = sentence_spans(text);

    f.num_values = count_numeric_literals(text);
    f.num_questions = count_question_runs(text);
    f.num_sentences = static_cast<int>(spans.size());
    f.num_entities = count_entities(text, spans);
    f.num_comparisons = count_lexicon(lowered, lex.comparisons);
    f.num_conditionals = count_lexicon(lowered, lex.conditionals);
    f.num_operations = count_lexicon(lowered, lex.operations);
    f.has_comparison = f.num_comparisons > 0;
    f.has_unit_conversion =
        count_lexicon(lowered, lex.conversion_keywords) > 0 || has_unit_pair(lowered, lex.unit_pairs);
    f.step_count = step_count(f);
    return f;
}

int step_count(const MathFeatures& f) {
    return f.num_questions + f.num_sentences + f.num_operations + f.num_comparisons +
           f.num_conditionals;
}

const char* to_string(OpTag t) {
    switch (t) {
        case OpTag::kAdd: return "add";
        case OpTag::kSub: return "sub";
        case OpTag::kMul: return "mul";
        case OpTag::kDiv: return "div";
    }
    return "?";
}

std::set<OpTag> operation_tags(std::string_view solution_text) {
    std::set<OpTag> tags;
    for (size_t i = 1; i + 1 < solution_text.size(); ++i) {
        const char op = solution_text[i];
        OpTag tag;
        if (op == '+') tag = OpTag::kAdd;
        else if (op == '-') tag = OpTag::kSub;
        else if (op == '*') tag = OpTag::kMul;
        else if (op == '/') tag = OpTag::kDiv;
        else continue;
        // digit (optional spaces) op (optional spaces) digit
        size_t l = i;
        while (l > 0 && solution_text[l - 1] == ' ') --l;
        size_t r = i + 1;
        while (r < solution_text.size() && solution_text[r] == ' ') ++r;
        if (l > 0 && std::isdigit(static_cast<unsigned char>(solution_text[l - 1])) &&
            r < solution_text.size() && std::isdigit(static_cast<unsigned char>(solution_text[r])))
            tags.insert(tag);
    }
    return tags;
}

namespace {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::map<std::string, std::optional<double>> feature_improvement_correlation(
    std::span<const MathFeatures> features, std::span<const int> base_scores,
    std::span<const int> adapter_scores) {
    if (features.size() != base_scores.size() || features.size() != adapter_scores.size())
        fail(ErrorCode::kSchema, "features and score lists must be parallel");
    if (features.empty()) fail(ErrorCode::kEmptyInput, "no problems to correlate");

    std::vector<double> improvement(features.size());
    for (size_t i = 0; i < features.size(); ++i)
        improvement[i] = static_cast<double>(adapter_scores[i] - base_scores[i]);

    const std::vector<std::pair<std::string, std::function<double(const MathFeatures&)>>> fields = {
        {"num_values", [](const MathFeatures& f) { return double(f.num_values); }},
        {"num_questions", [](const MathFeatures& f) { return double(f.num_questions); }},
        {"num_entities", [](const MathFeatures& f) { return double(f.num_entities); }},
        {"num_comparisons", [](const MathFeatures& f) { return double(f.num_comparisons); }},
        {"num_sentences", [](const MathFeatures& f) { return double(f.num_sentences); }},
        {"num_operations", [](const MathFeatures& f) { return double(f.num_operations); }},
        {"num_conditionals", [](const MathFeatures& f) { return double(f.num_conditionals); }},
        {"has_comparison", [](const MathFeatures& f) { return f.has_comparison ? 1.0 : 0.0; }},
        {"has_unit_conversion",
         [](const MathFeatures& f) { return f.has_unit_conversion ? 1.0 : 0.0; }},
        {"step_count", [](const MathFeatures& f) { return double(f.step_count); }},
    };

    std::map<std::string, std::optional<double>> out;
    std::vector<double> column(features.size());
    for (const auto& [name, getter] : fields) {
        for (size_t i = 0; i < features.size(); ++i) column[i] = getter(features[i]);
        out[name] = pearson(column, improvement);
    }
    return out;
}

ImportanceRatioTable relation_importance(std::span<const std::vector<conllu::Sentence>> problems,
                                         std::span<const int> base_scores,
                                         std::span<const int> adapter_scores, ImportanceKey key) {
    if (problems.size() != base_scores.size() || problems.size() != adapter_scores.size())
        fail(ErrorCode::kSchema, "problems and score lists must be parallel");

    ImportanceRatioTable table;
    table.key = key == ImportanceKey::kDeprel ? "deprel" : "upos";
    for (size_t i = 0; i < problems.size(); ++i) {
        std::set<std::string> present;
        for (const auto& sentence : problems[i])
            for (const auto& token : sentence.tokens)
                present.insert(key == ImportanceKey::kDeprel ? token.deprel : token.upos);
        for (const auto& k : present) {
            auto& row = table.rows[k];
            if (base_scores[i] == 1) ++row.base_success;
            if (adapter_scores[i] == 1) ++row.adapter_success;
        }
    }
    for (auto& [k, row] : table.rows)
        if (row.base_success > 0)
            row.ratio = static_cast<double>(row.adapter_success) /
                        static_cast<double>(row.base_success);
    return table;
}

std::string lingfeat_to_json(std::span<const std::string> problem_ids,
                             std::span<const MathFeatures> features,
                             const std::map<std::string, std::optional<double>>& correlations,
                             const std::optional<ImportanceRatioTable>& importance,
                             std::span<const std::set<OpTag>> op_tags) {
    json j;
    j["kind"] = "lingfeat";
    json problems = json::array();
    for (size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        json p;
        p["id"] = i < problem_ids.size() ? problem_ids[i] : std::to_string(i);
        p["features"] = {{"num_values", f.num_values},
                         {"num_questions", f.num_questions},
                         {"num_entities", f.num_entities},
                         {"num_comparisons", f.num_comparisons},
                         {"num_sentences", f.num_sentences},
                         {"num_operations", f.num_operations},
                         {"num_conditionals", f.num_conditionals},
                         {"has_comparison", f.has_comparison},
                         {"has_unit_conversion", f.has_unit_conversion},
                         {"step_count", f.step_count}};
        if (i < op_tags.size()) {
            json ops = json::array();
            for (OpTag t : op_tags[i]) ops.push_back(to_string(t));
            p["operations"] = ops;
        }
        problems.push_back(std::move(p));
    }
    j["problems"] = problems;

    json corr = json::object();
    for (const auto& [name, value] : correlations) {
        if (value) corr[name] = *value;
        else corr[name] = nullptr;
    }
    j["correlations"] = corr;

    if (importance) {
        json imp;
        imp["key"] = importance->key;
        json rows = json::object();
        for (const auto& [k, row] : importance->rows) {
            json r;
            r["adapter_success"] = row.adapter_success;
            r["base_success"] = row.base_success;
            if (row.ratio) r["ratio"] = *row.ratio;
            else r["ratio"] = nullptr;  // never serialized as infinity
            rows[k] = std::move(r);
        }
        imp["rows"] = rows;
        j["importance"] = imp;
    } else {
        j["importance"] = nullptr;
    }
    return j.dump(2) + "\n";
}

}  // namespace crosstask
