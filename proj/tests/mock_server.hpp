#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace testutil {

/// In-process chat-completions + embeddings endpoint with probes for
/// call counts and peak concurrency.
class MockServer {
public:
    std::atomic<int> judge_calls{0};
    std::atomic<int> embed_calls{0};
    std::atomic<int> in_flight{0};
    std::atomic<int> peak_in_flight{0};
    std::atomic<int> fail_first{0};   // reply HTTP 500 to this many judge calls
    std::string judge_reply = "1";
    int handler_delay_ms = 0;
    int embed_dim = 4;

    MockServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request&, httplib::Response& res) {
            const int now = ++in_flight;
            int prev = peak_in_flight.load();
            while (now > prev && !peak_in_flight.compare_exchange_weak(prev, now)) {
            }
            if (handler_delay_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(handler_delay_ms));
            ++judge_calls;
            if (fail_first.load() > 0) {
                --fail_first;
                res.status = 500;
                res.set_content("try later", "text/plain");
            } else {
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"role", "assistant"}, {"content", judge_reply}}}}}}};
                res.set_content(reply.dump(), "application/json");
            }
            --in_flight;
        });
        server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
            ++embed_calls;
            const auto body = nlohmann::json::parse(req.body);
            nlohmann::json data = nlohmann::json::array();
            int index = 0;
            for (const auto& _ : body.at("input")) {
                std::vector<double> vec(static_cast<size_t>(embed_dim), 0.0);
                vec[static_cast<size_t>(index) % vec.size()] = 1.0;
                data.push_back({{"index", index}, {"embedding", vec}});
                ++index;
            }
            res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
    }

    /// Binds an ephemeral port and serves until stop(). Returns base_url.
    std::string start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ~MockServer() { stop(); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace testutil
