#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crosstask/matrix.hpp"

namespace crosstask {

/// One scored (model, task, example) triple; the atomic unit the
/// performance matrix aggregates. `score` is empty for records awaiting
/// judgement.
struct EvalRecord {
    std::string model_id;
    std::string task_id;
    std::string example_id;
    std::string prediction;
    std::string gold;
    std::optional<int> score;  // 0 or 1 when present
};

/// One JSON object per line: {"model_id","task_id","example_id",
/// "prediction","gold","score"}. With require_score the score field must
/// be present and 0/1; without it the field may be absent.
std::vector<EvalRecord> load_eval_records(const std::string& path, bool require_score = true);
void write_eval_records(std::span<const EvalRecord> records, const std::string& path);

/// cell = 100 * mean(score) per (model, task) group; labels sorted
/// lexicographically. Throws on empty input, missing scores or duplicate
/// (model, task, example) keys.
PerformanceMatrix aggregate_records(std::span<const EvalRecord> records);

/// Content hash of the judged tuple; the score cache key.
uint64_t judge_cache_key(const EvalRecord& r);

/// Append-only line-delimited judge-score cache. Reads tolerate replayed
/// keys (last one wins). Appends must be serialized by the caller.
class ScoreCache {
public:
    ScoreCache() = default;
    explicit ScoreCache(std::string path);  // loads existing entries if the file exists

    std::optional<int> lookup(uint64_t key) const;
    void put(uint64_t key, int score);  // appends to the backing file when one is set

    size_t size() const { return entries_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::unordered_map<uint64_t, int> entries_;
};

}  // namespace crosstask
