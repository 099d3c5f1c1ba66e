#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crosstask/datasets.hpp"
#include "crosstask/eval_records.hpp"

namespace crosstask {

/// Judging temperature is pinned to 0 and deliberately not configurable.
struct EndpointConfig {
    std::string base_url;                          // e.g. http://127.0.0.1:8080/v1
    std::string model;
    std::string auth_env = "CROSSTASK_API_TOKEN";  // bearer token env var; header sent only if set
    int max_in_flight = 4;
    int retry_budget = 3;                          // retries after the first attempt
    double timeout_seconds = 30.0;
    int backoff_initial_ms = 250;                  // doubles per retry
    int embed_batch_size = 1000;

    void validate() const;
};

/// Byte-exact judge prompt: the chat-template wrapper with the gold
/// answer and the model output inserted verbatim (no escaping), ending
/// in the "Score:" cue.
std::string render_judge_prompt(std::string_view gold, std::string_view prediction);

struct JudgeOutcome {
    std::optional<int> score;
    std::string error;      // set when score is absent
    bool from_cache = false;
};

class ModelClient {
public:
    explicit ModelClient(EndpointConfig config);

    /// One synchronous judgement; throws on transport or format failure.
    int judge(std::string_view gold, std::string_view prediction);

    /// Scores every record with at most max_in_flight requests
    /// outstanding. Identical (model, task, example, prediction, gold)
    /// tuples are fetched once; cached tuples are never re-sent. Failed
    /// items are reported per-item, not batch-fatally.
    std::vector<JudgeOutcome> judge_records(std::span<const EvalRecord> records,
                                            ScoreCache* cache);

    /// Batched embedding retrieval; ids default to input positions.
    EmbeddingSet embed(std::span<const std::string> texts,
                       std::span<const std::string> ids = {});

    const EndpointConfig& config() const { return config_; }

private:
    EndpointConfig config_;
};

}  // namespace crosstask
