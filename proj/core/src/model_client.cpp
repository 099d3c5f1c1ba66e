#include "crosstask/model_client.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

void EndpointConfig::validate() const {
    if (base_url.empty()) fail(ErrorCode::kConfig, "endpoint base_url is empty");
    if (max_in_flight < 1) fail(ErrorCode::kConfig, "max_in_flight must be >= 1");
    if (timeout_seconds <= 0) fail(ErrorCode::kConfig, "timeout must be positive");
    if (retry_budget < 0) fail(ErrorCode::kConfig, "retry budget must be >= 0");
    if (embed_batch_size < 1) fail(ErrorCode::kConfig, "embed batch size must be >= 1");
}

std::string render_judge_prompt(std::string_view gold, std::string_view prediction) {
    std::string out;
    out.reserve(512 + gold.size() + prediction.size());
    out += "<|begin_of_text|><|start_header_id|>\n";
    out += "system<|end_header_id|>\n";
    out += "\n";
    out += "Your job is to check whether the AI's answer is correct.\n";
    out += "\n";
    out += "Compare it with the correct answer and \n";
    out += "score it as either 0\n";
    out += "if the AI's answer is wrong or 1 if it is correct.\n";
    out += "\n";
    out += "DO NOT provide any explanations.<|eot_id|>\n";
    out += "<|start_header_id|>user<|end_header_id|>\n";
    out += "Correct Answer: ";
    out += gold;
    out += "\n";
    out += "AI Answer: ";
    out += prediction;
    out += "<|eot_id|>\n";
    out += "\n";
    out += "<|start_header_id|>assistant<|end_header_id|>\n";
    out += "\n";
    out += "Score:";
    return out;
}

namespace {

struct SplitUrl {
    std::string host;  // scheme://authority
    std::string path;  // possibly empty prefix
};

SplitUrl split_base_url(const std::string& base_url) {
    const auto scheme = base_url.find("://");
    if (scheme == std::string::npos)
        fail(ErrorCode::kConfig, "base_url needs a scheme: " + base_url);
    const auto slash = base_url.find('/', scheme + 3);
    if (slash == std::string::npos) return {base_url, ""};
    std::string path = base_url.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {base_url.substr(0, slash), path};
}

httplib::Headers auth_headers(const EndpointConfig& cfg) {
    httplib::Headers headers;
    if (!cfg.auth_env.empty()) {
        if (const char* token = std::getenv(cfg.auth_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

std::unique_ptr<httplib::Client> make_client(const EndpointConfig& cfg, const SplitUrl& url) {
    auto client = std::make_unique<httplib::Client>(url.host);
    const auto seconds = static_cast<time_t>(cfg.timeout_seconds);
    const auto micros =
        static_cast<long>((cfg.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client->set_connection_timeout(seconds, micros);
    client->set_read_timeout(seconds, micros);
    client->set_write_timeout(seconds, micros);
    return client;
}

/// POSTs with exponential backoff. Returns the body on HTTP 200, or the
/// last failure description.
struct PostResult {
    bool ok = false;
    std::string body;
    std::string error;
};

PostResult post_with_retries(const EndpointConfig& cfg, const SplitUrl& url,
                             const std::string& endpoint, const std::string& payload) {
    auto client = make_client(cfg, url);
    const auto headers = auth_headers(cfg);
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg.retry_budget; ++attempt) {
        if (attempt > 0) {
            const auto delay = cfg.backoff_initial_ms * (1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        auto res = client->Post(url.path + endpoint, headers, payload, "application/json");
        if (res && res->status == 200) return {true, res->body, ""};
        if (res) last_error = "HTTP " + std::to_string(res->status);
        else last_error = "connection failure (" + httplib::to_string(res.error()) + ")";
    }
    return {false, "", last_error + " after " + std::to_string(cfg.retry_budget + 1) + " attempts"};
}

std::optional<int> first_binary_digit(const std::string& reply) {
    for (char c : reply) {
        if (c == '0') return 0;
        if (c == '1') return 1;
    }
    return std::nullopt;
}

/// Extracts choices[0].message.content from a chat-completions reply.
std::optional<std::string> chat_content(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        return std::nullopt;
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string())
        return std::nullopt;
    return choice["message"]["content"].get<std::string>();
}

json judge_payload(const EndpointConfig& cfg, std::string_view gold, std::string_view prediction) {
    json body;
    body["model"] = cfg.model;
    body["temperature"] = 0;
    body["messages"] = json::array({json{{"role", "user"},
                                         {"content", render_judge_prompt(gold, prediction)}}});
    return body;
}

}  // namespace

ModelClient::ModelClient(EndpointConfig config) : config_(std::move(config)) {
    config_.validate();
}

int ModelClient::judge(std::string_view gold, std::string_view prediction) {
    const auto url = split_base_url(config_.base_url);
    const auto result = post_with_retries(config_, url, "/chat/completions",
                                          judge_payload(config_, gold, prediction).dump());
    if (!result.ok) fail(ErrorCode::kTransport, "judge request failed: " + result.error);
    const auto content = chat_content(result.body);
    if (!content) fail(ErrorCode::kJudgeFormat, "judge reply is not a chat completion");
    const auto digit = first_binary_digit(*content);
    if (!digit) fail(ErrorCode::kJudgeFormat, "judge reply has no 0/1 digit: " + *content);
    return *digit;
}

std::vector<JudgeOutcome> ModelClient::judge_records(std::span<const EvalRecord> records,
                                                     ScoreCache* cache) {
    const auto url = split_base_url(config_.base_url);
    std::vector<JudgeOutcome> outcomes(records.size());

    // Content-addressed de-duplication: each distinct tuple is fetched
    // once, and cached tuples never reach the network.
    std::vector<uint64_t> keys(records.size());
    std::map<uint64_t, std::vector<size_t>> by_key;
    for (size_t i = 0; i < records.size(); ++i) {
        keys[i] = judge_cache_key(records[i]);
        by_key[keys[i]].push_back(i);
    }

    struct Job {
        uint64_t key;
        size_t representative;  // record index carrying the payload
    };
    std::vector<Job> jobs;
    for (const auto& [key, indices] : by_key) {
        if (cache) {
            if (auto hit = cache->lookup(key)) {
                for (size_t i : indices) outcomes[i] = {*hit, "", true};
                continue;
            }
        }
        jobs.push_back({key, indices.front()});
    }

    std::mutex result_mutex;  // guards outcomes and the single-writer cache
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const auto& record = records[jobs[j].representative];
            const auto result =
                post_with_retries(config_, url, "/chat/completions",
                                  judge_payload(config_, record.gold, record.prediction).dump());
            JudgeOutcome outcome;
            if (!result.ok) {
                outcome.error = "transport: " + result.error;
            } else if (auto content = chat_content(result.body); !content) {
                outcome.error = "judge_format: reply is not a chat completion";
            } else if (auto digit = first_binary_digit(*content); !digit) {
                outcome.error = "judge_format: no 0/1 digit in reply";
            } else {
                outcome.score = *digit;
            }

            std::lock_guard<std::mutex> lock(result_mutex);
            for (size_t i : by_key.at(jobs[j].key)) outcomes[i] = outcome;
            if (outcome.score && cache) cache->put(jobs[j].key, *outcome.score);
        }
    };

    const size_t n_workers =
        std::min<size_t>(static_cast<size_t>(config_.max_in_flight), jobs.size());
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return outcomes;
}

EmbeddingSet ModelClient::embed(std::span<const std::string> texts,
                                std::span<const std::string> ids) {
    if (texts.empty()) fail(ErrorCode::kArgument, "embed needs at least one text");
    if (!ids.empty() && ids.size() != texts.size())
        fail(ErrorCode::kSchema, "ids and texts must be parallel");
    const auto url = split_base_url(config_.base_url);

    EmbeddingSet set;
    for (size_t start = 0; start < texts.size();
         start += static_cast<size_t>(config_.embed_batch_size)) {
        const size_t end =
            std::min(texts.size(), start + static_cast<size_t>(config_.embed_batch_size));
        json body;
        body["model"] = config_.model;
        json input = json::array();
        for (size_t i = start; i < end; ++i) input.push_back(texts[i]);
        body["input"] = input;

        const auto result = post_with_retries(config_, url, "/embeddings", body.dump());
        if (!result.ok) fail(ErrorCode::kTransport, "embeddings request failed: " + result.error);
        json reply = json::parse(result.body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
            reply["data"].size() != end - start)
            fail(ErrorCode::kSchema, "embeddings reply malformed or wrong cardinality");

        for (size_t i = start; i < end; ++i) {
            const auto& item = reply["data"][i - start];
            if (!item.contains("embedding") || !item["embedding"].is_array())
                fail(ErrorCode::kSchema, "embeddings entry missing vector");
            auto vec = item["embedding"].get<std::vector<double>>();
            if (set.vectors.empty()) set.dim = vec.size();
            else if (vec.size() != set.dim)
                fail(ErrorCode::kSchema, "embedding dimension changed across batches");
            set.vectors.push_back(std::move(vec));
            set.ids.push_back(ids.empty() ? std::to_string(i) : ids[i]);
        }
    }
    set.validate();
    return set;
}

}  // namespace crosstask
