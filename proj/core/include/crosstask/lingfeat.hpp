#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crosstask/conllu.hpp"

namespace crosstask {

/// Keyword lists driving the math-feature extractor. Shipped as a data
/// file (data/lexicons.json); defaults() mirrors it.
struct Lexicons {
    std::vector<std::string> comparisons;
    std::vector<std::string> conditionals;
    std::vector<std::string> conversion_keywords;
    std::vector<std::pair<std::string, std::string>> unit_pairs;
    std::vector<std::string> operations;

    static Lexicons defaults();
    static Lexicons load(const std::string& path);
};

/// Per-problem linguistic features of a math word problem.
///
/// Numeric literals are digit runs with an optional decimal fraction
/// ([0-9]+(\.[0-9]+)?), so comma-grouped thousands count per digit group.
/// Sentences split on ".?!" runs followed by whitespace or end of text.
/// Entity occurrences are capitalized tokens not in sentence-initial
/// position. All keyword matches are case-insensitive on word
/// boundaries.
struct MathFeatures {
    int num_values = 0;
    int num_questions = 0;
    int num_entities = 0;
    int num_comparisons = 0;
    int num_sentences = 0;
    int num_operations = 0;
    int num_conditionals = 0;
    bool has_comparison = false;
    bool has_unit_conversion = false;
    int step_count = 0;  // questions + sentences + operations + comparisons + conditionals
};

MathFeatures extract_math_features(std::string_view text, const Lexicons& lex);

/// The five-term complexity heuristic, recomputed from the fields.
int step_count(const MathFeatures& f);

enum class OpTag { kAdd, kSub, kMul, kDiv };
const char* to_string(OpTag t);

/// Arithmetic operators appearing in a solution's expressions: both
/// <<a+b=c>> calculator annotations and bare digit-infix-digit forms.
std::set<OpTag> operation_tags(std::string_view solution_text);

/// Pearson correlation of each numeric feature (booleans as 0/1) against
/// per-problem improvement = adapter - base in {-1, 0, 1}. Zero-variance
/// sides yield an empty optional.
std::map<std::string, std::optional<double>> feature_improvement_correlation(
    std::span<const MathFeatures> features, std::span<const int> base_scores,
    std::span<const int> adapter_scores);

struct ImportanceRow {
    size_t adapter_success = 0;
    size_t base_success = 0;
    std::optional<double> ratio;  // adapter/base where base > 0
};

struct ImportanceRatioTable {
    std::string key;  // "deprel" or "upos"
    std::map<std::string, ImportanceRow> rows;
};

enum class ImportanceKey { kDeprel, kUpos };

/// For each key value k: how many problems containing k (at least once)
/// each model solved, and the adapter/base ratio where defined.
ImportanceRatioTable relation_importance(std::span<const std::vector<conllu::Sentence>> problems,
                                         std::span<const int> base_scores,
                                         std::span<const int> adapter_scores, ImportanceKey key);

std::string lingfeat_to_json(std::span<const std::string> problem_ids,
                             std::span<const MathFeatures> features,
                             const std::map<std::string, std::optional<double>>& correlations,
                             const std::optional<ImportanceRatioTable>& importance,
                             std::span<const std::set<OpTag>> op_tags);

}  // namespace crosstask
