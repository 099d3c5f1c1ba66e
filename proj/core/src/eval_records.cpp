#include "crosstask/eval_records.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"
#include "crosstask/hash.hpp"

namespace crosstask {

using json = nlohmann::json;

namespace {

std::string require_string(const json& j, const char* field, size_t line_no) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        fail(ErrorCode::kSchema,
             "record line " + std::to_string(line_no) + ": missing string field '" + field + "'");
    return it->get<std::string>();
}

}  // namespace

std::vector<EvalRecord> load_eval_records(const std::string& path, bool require_score) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open records file: " + path);

    std::vector<EvalRecord> records;
    std::set<std::tuple<std::string, std::string, std::string>> keys;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, "records line " + std::to_string(line_no) + ": " + e.what());
        }
        EvalRecord r;
        r.model_id = require_string(j, "model_id", line_no);
        r.task_id = require_string(j, "task_id", line_no);
        r.example_id = require_string(j, "example_id", line_no);
        r.prediction = require_string(j, "prediction", line_no);
        r.gold = require_string(j, "gold", line_no);
        if (j.contains("score") && !j["score"].is_null()) {
            if (!j["score"].is_number_integer())
                fail(ErrorCode::kSchema,
                     "records line " + std::to_string(line_no) + ": score must be an integer");
            int s = j["score"].get<int>();
            if (s != 0 && s != 1)
                fail(ErrorCode::kSchema,
                     "records line " + std::to_string(line_no) + ": score must be 0 or 1");
            r.score = s;
        } else if (require_score) {
            fail(ErrorCode::kSchema,
                 "records line " + std::to_string(line_no) + ": missing score");
        }
        if (!keys.insert({r.model_id, r.task_id, r.example_id}).second)
            fail(ErrorCode::kSchema, "records line " + std::to_string(line_no) +
                                         ": duplicate (model, task, example) key");
        records.push_back(std::move(r));
    }
    return records;
}

void write_eval_records(std::span<const EvalRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write records file: " + path);
    for (const auto& r : records) {
        json j;
        j["model_id"] = r.model_id;
        j["task_id"] = r.task_id;
        j["example_id"] = r.example_id;
        j["prediction"] = r.prediction;
        j["gold"] = r.gold;
        if (r.score) j["score"] = *r.score;
        out << j.dump() << '\n';
    }
}

PerformanceMatrix aggregate_records(std::span<const EvalRecord> records) {
    if (records.empty()) fail(ErrorCode::kEmptyInput, "no records to aggregate");

    // std::map keeps labels sorted lexicographically.
    std::map<std::string, std::map<std::string, std::pair<long, long>>> groups;  // sum, count
    std::set<std::string> tasks;
    for (const auto& r : records) {
        if (!r.score) fail(ErrorCode::kSchema, "unscored record for model '" + r.model_id + "'");
        auto& cell = groups[r.model_id][r.task_id];
        cell.first += *r.score;
        cell.second += 1;
        tasks.insert(r.task_id);
    }

    PerformanceMatrix m;
    for (const auto& [model, _] : groups) m.row_labels.push_back(model);
    m.col_labels.assign(tasks.begin(), tasks.end());
    m.values.assign(m.rows() * m.cols(), 0.0);
    for (size_t r = 0; r < m.rows(); ++r) {
        const auto& by_task = groups.at(m.row_labels[r]);
        for (size_t c = 0; c < m.cols(); ++c) {
            auto it = by_task.find(m.col_labels[c]);
            if (it == by_task.end())
                fail(ErrorCode::kSchema, "no records for (" + m.row_labels[r] + ", " +
                                             m.col_labels[c] + "); matrix would be ragged");
            m.at(r, c) = 100.0 * static_cast<double>(it->second.first) /
                         static_cast<double>(it->second.second);
        }
    }
    for (const auto& r : m.row_labels)
        if (r == "None") m.baseline_row = r;
    m.validate();
    return m;
}

uint64_t judge_cache_key(const EvalRecord& r) {
    return fnv1a64_fields({r.model_id, r.task_id, r.example_id, r.prediction, r.gold});
}

ScoreCache::ScoreCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // nothing cached yet
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, "cache line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("key") || !j.contains("score"))
            fail(ErrorCode::kSchema, "cache line " + std::to_string(line_no) + ": need key+score");
        entries_[std::stoull(j["key"].get<std::string>(), nullptr, 16)] = j["score"].get<int>();
    }
}

std::optional<int> ScoreCache::lookup(uint64_t key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ScoreCache::put(uint64_t key, int score) {
    entries_[key] = score;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) fail(ErrorCode::kIo, "cannot append to cache: " + path_);
    json j;
    j["key"] = hex64(key);
    j["score"] = score;
    out << j.dump() << '\n';
}

}  // namespace crosstask
