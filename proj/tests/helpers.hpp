#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crosstask/datasets.hpp"
#include "crosstask/matrix.hpp"
#include "crosstask/rng.hpp"

namespace testutil {

inline std::string data_dir() { return CROSSTASK_DATA_DIR; }
inline std::string test_data_dir() { return CROSSTASK_TEST_DATA_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(static_cast<bool>(in), "cannot open ", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string slurp(const std::string& path) {  // no doctest dependency
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// 1,000-example sentiment fixture shaped like the paper's Flipkart
/// description: 812 positive / 139 negative / 49 neutral, with negative
/// reviews constructed longer than positive ones.
inline crosstask::LabeledDataset flipkart_fixture() {
    crosstask::LabeledDataset ds;
    std::mt19937_64 gen(42);
    auto add = [&](const std::string& label, size_t count, uint64_t min_tokens,
                   uint64_t max_tokens) {
        for (size_t i = 0; i < count; ++i) {
            const uint64_t tokens =
                min_tokens + crosstask::rng::bounded(gen, max_tokens - min_tokens + 1);
            std::string text = "review";
            for (uint64_t t = 1; t < tokens; ++t) text += " w" + std::to_string(t % 7);
            ds.ids.push_back(label.substr(0, 3) + std::to_string(i));
            ds.texts.push_back(text);
            ds.labels.push_back(label);
        }
    };
    add("positive", 812, 5, 20);
    add("negative", 139, 25, 60);
    add("neutral", 49, 15, 25);
    return ds;
}

inline crosstask::PerformanceMatrix random_matrix(std::mt19937_64& gen, size_t rows, size_t cols) {
    crosstask::PerformanceMatrix m;
    for (size_t r = 0; r < rows; ++r) m.row_labels.push_back("model" + std::to_string(r));
    for (size_t c = 0; c < cols; ++c) m.col_labels.push_back("task" + std::to_string(c));
    m.values.resize(rows * cols);
    for (auto& v : m.values)
        v = static_cast<double>(crosstask::rng::bounded(gen, 10000)) / 100.0;
    return m;
}

struct CliResult {
    int exit_code = -1;
    std::string stderr_text;
};

/// Runs the installed CLI with the given argument string, capturing exit
/// code and stderr.
inline CliResult run_cli(const std::string& args, const std::string& scratch_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(scratch_dir);
    const std::string err_path = scratch_dir + "/stderr.txt";
    const std::string cmd =
        std::string(CROSSTASK_CLI) + " " + args + " 2> " + err_path + " > /dev/null";
    const int raw = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = raw == -1 ? -1 : WEXITSTATUS(raw);
    res.stderr_text = slurp(err_path);
    return res;
}

inline std::string fresh_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "crosstask_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

}  // namespace testutil
