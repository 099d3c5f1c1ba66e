#include "crosstask/dist_stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"
#include "crosstask/rng.hpp"

namespace crosstask {

using json = nlohmann::json;

const char* to_string(LengthUnit u) {
    return u == LengthUnit::kCharacters ? "characters" : "whitespace_tokens";
}

LengthUnit length_unit_from_string(const std::string& s) {
    if (s == "characters" || s == "chars") return LengthUnit::kCharacters;
    if (s == "whitespace_tokens" || s == "tokens") return LengthUnit::kWhitespaceTokens;
    fail(ErrorCode::kArgument, "unknown length unit: " + s);
}

long text_length(std::string_view text, LengthUnit unit) {
    if (unit == LengthUnit::kCharacters) return static_cast<long>(text.size());
    long tokens = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        bool ws = std::isspace(c) != 0;
        if (!ws && !in_token) ++tokens;
        in_token = !ws;
    }
    return tokens;
}

namespace {

template <typename T>
double interpolated_quantile(std::span<const T> sorted, double p) {
    const size_t n = sorted.size();
    if (n == 1) return static_cast<double>(sorted[0]);
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<size_t>(h);
    if (lo + 1 >= n) return static_cast<double>(sorted[n - 1]);
    const double frac = h - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) +
           frac * (static_cast<double>(sorted[lo + 1]) - static_cast<double>(sorted[lo]));
}

}  // namespace

double quantile_sorted(std::span<const long> sorted, double p) {
    if (sorted.empty()) fail(ErrorCode::kEmptyInput, "quantile of empty sample");
    return interpolated_quantile(sorted, p);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) fail(ErrorCode::kEmptyInput, "quantile of empty sample");
    return interpolated_quantile(sorted, p);
}

LengthProfile length_profile_from_samples(std::vector<long> samples, LengthUnit unit) {
    if (samples.empty()) fail(ErrorCode::kEmptyInput, "length profile of empty text list");
    LengthProfile p;
    p.unit = unit;
    p.samples = std::move(samples);

    std::vector<long> sorted = p.samples;
    std::sort(sorted.begin(), sorted.end());
    p.min = sorted.front();
    p.max = sorted.back();
    double sum = 0;
    for (long v : p.samples) sum += static_cast<double>(v);
    p.mean = sum / static_cast<double>(p.samples.size());
    const double probs[5] = {0.05, 0.25, 0.50, 0.75, 0.95};
    for (size_t i = 0; i < 5; ++i) p.quantiles[i] = quantile_sorted(sorted, probs[i]);
    p.median = p.quantiles[2];
    return p;
}

LengthProfile length_profile(std::span<const std::string> texts, LengthUnit unit) {
    std::vector<long> samples;
    samples.reserve(texts.size());
    for (const auto& t : texts) samples.push_back(text_length(t, unit));
    return length_profile_from_samples(std::move(samples), unit);
}

ClassProfile class_profile(std::span<const std::string> labels) {
    if (labels.empty()) fail(ErrorCode::kEmptyInput, "class profile of empty label list");
    std::map<std::string, size_t> counts;
    for (const auto& l : labels) ++counts[l];

    ClassProfile p;
    const double n = static_cast<double>(labels.size());
    size_t majority = 0;
    double entropy = 0;
    for (const auto& [label, count] : counts) {
        p.counts.emplace_back(label, count);
        double prop = static_cast<double>(count) / n;
        p.proportions.emplace_back(label, prop);
        entropy -= prop * std::log(prop);
        majority = std::max(majority, count);
    }
    p.majority_ratio = static_cast<double>(majority) / n;
    p.normalized_entropy =
        counts.size() <= 1 ? 0.0 : entropy / std::log(static_cast<double>(counts.size()));
    return p;
}

double kde_pdf(std::span<const double> samples, double bandwidth, double x) {
    const double inv_h = 1.0 / bandwidth;
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth *
                               static_cast<double>(samples.size()));
    double acc = 0;
    for (double s : samples) {
        const double u = (x - s) * inv_h;
        acc += std::exp(-0.5 * u * u);
    }
    return acc * norm;
}

double silverman_bandwidth(std::span<const double> samples) {
    const auto n = static_cast<double>(samples.size());
    double mean = 0;
    for (double s : samples) mean += s;
    mean /= n;
    double var = 0;
    for (double s : samples) var += (s - mean) * (s - mean);
    const double sigma = std::sqrt(var / n);

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(std::span<const double>(sorted), 0.75) -
                       quantile_sorted(std::span<const double>(sorted), 0.25);

    const double h = 0.9 * std::min(sigma, iqr / 1.34) * std::pow(n, -0.2);
    return h > 0 ? h : 1.0;  // degenerate sample fallback, in the sample's unit
}

KdeCurve kde(std::span<const double> samples, std::optional<double> bandwidth) {
    if (samples.empty()) fail(ErrorCode::kEmptyInput, "kde of empty sample");
    for (double s : samples)
        if (!std::isfinite(s)) fail(ErrorCode::kNumeric, "non-finite kde sample");
    if (bandwidth && *bandwidth <= 0) fail(ErrorCode::kArgument, "bandwidth must be positive");

    KdeCurve curve;
    curve.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(samples);
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - 5.0 * curve.bandwidth;
    const double hi = *hi_it + 5.0 * curve.bandwidth;

    constexpr size_t kGridSize = 512;
    curve.grid.resize(kGridSize);
    curve.density.resize(kGridSize);
    const double step = (hi - lo) / static_cast<double>(kGridSize - 1);
    for (size_t i = 0; i < kGridSize; ++i) {
        curve.grid[i] = lo + static_cast<double>(i) * step;
        curve.density[i] = kde_pdf(samples, curve.bandwidth, curve.grid[i]);
    }
    return curve;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) fail(ErrorCode::kEmptyInput, "ks distance of empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const auto n = static_cast<long long>(sa.size());
    const auto m = static_cast<long long>(sb.size());
    long long ia = 0, ib = 0, sup_num = 0;
    while (ia < n || ib < m) {
        double v;
        if (ia >= n) v = sb[static_cast<size_t>(ib)];
        else if (ib >= m) v = sa[static_cast<size_t>(ia)];
        else v = std::min(sa[static_cast<size_t>(ia)], sb[static_cast<size_t>(ib)]);
        while (ia < n && sa[static_cast<size_t>(ia)] <= v) ++ia;
        while (ib < m && sb[static_cast<size_t>(ib)] <= v) ++ib;
        sup_num = std::max(sup_num, std::llabs(ia * m - ib * n));
    }
    return static_cast<double>(sup_num) / static_cast<double>(n * m);
}

PerClassLength per_class_length(std::span<const std::string> texts,
                                std::span<const std::string> labels, LengthUnit unit,
                                std::span<const std::string> expected_labels) {
    if (texts.size() != labels.size())
        fail(ErrorCode::kSchema, "texts and labels differ in length");
    std::map<std::string, std::vector<long>> buckets;
    for (size_t i = 0; i < texts.size(); ++i)
        buckets[labels[i]].push_back(text_length(texts[i], unit));

    PerClassLength out;
    for (auto& [label, samples] : buckets)
        out.by_label.emplace(label, length_profile_from_samples(std::move(samples), unit));
    for (const auto& expected : expected_labels)
        if (!out.by_label.count(expected)) out.missing_labels.push_back(expected);
    return out;
}

std::vector<size_t> rebalance_plan(std::span<const std::string> labels,
                                   const std::map<std::string, double>& target, uint64_t seed) {
    if (labels.empty()) fail(ErrorCode::kEmptyInput, "rebalance of empty label list");
    double total = 0;
    for (const auto& [label, prop] : target) {
        if (prop < 0) fail(ErrorCode::kArgument, "negative target proportion for " + label);
        total += prop;
    }
    if (std::abs(total - 1.0) > 1e-9)
        fail(ErrorCode::kArgument, "target proportions must sum to 1");

    std::map<std::string, std::vector<size_t>> members;
    for (size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    // Largest total T subsample respecting each class's availability.
    double t_bound = static_cast<double>(labels.size());
    for (const auto& [label, prop] : target) {
        if (prop == 0) continue;
        auto it = members.find(label);
        if (it == members.end())
            fail(ErrorCode::kInfeasible, "targeted class absent from dataset: " + label);
        t_bound = std::min(t_bound,
                           std::floor(static_cast<double>(it->second.size()) / prop));
    }
    const auto total_kept = static_cast<size_t>(t_bound);
    if (total_kept == 0) fail(ErrorCode::kInfeasible, "no subsample can satisfy the target");

    // Largest-remainder apportionment keeps every class within one
    // example of its exact share.
    std::vector<std::pair<std::string, size_t>> quota;
    std::vector<std::pair<double, size_t>> remainders;  // remainder, quota index
    size_t assigned = 0;
    for (const auto& [label, prop] : target) {
        const double exact = prop * static_cast<double>(total_kept);
        const auto base = static_cast<size_t>(std::floor(exact));
        quota.emplace_back(label, base);
        remainders.emplace_back(exact - std::floor(exact), quota.size() - 1);
        assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (size_t i = 0; assigned < total_kept && i < remainders.size(); ++i) {
        ++quota[remainders[i].second].second;
        ++assigned;
    }

    std::mt19937_64 gen(seed);
    std::vector<size_t> kept;
    for (const auto& [label, want] : quota) {
        if (want == 0) continue;
        auto& pool = members.at(label);
        if (want > pool.size())
            fail(ErrorCode::kInfeasible, "class too small for target: " + label);
        rng::shuffle(pool, gen);
        kept.insert(kept.end(), pool.begin(), pool.begin() + static_cast<long>(want));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

double interpolation_index(const LengthProfile& base, const LengthProfile& train,
                           const LengthProfile& adapted) {
    if (base.samples.empty() || train.samples.empty() || adapted.samples.empty())
        fail(ErrorCode::kEmptyInput, "interpolation index needs three non-empty profiles");
    const double span = train.median - base.median;
    if (span == 0) fail(ErrorCode::kNumeric, "base and train medians coincide; index undefined");
    const double idx = (adapted.median - base.median) / span;
    return std::clamp(idx, -0.5, 1.5);
}

namespace {

json length_profile_to_json(const LengthProfile& p) {
    json j;
    j["unit"] = to_string(p.unit);
    j["samples"] = p.samples;
    j["min"] = p.min;
    j["max"] = p.max;
    j["mean"] = p.mean;
    j["median"] = p.median;
    j["quantiles"] = {{"p5", p.quantiles[0]},
                      {"p25", p.quantiles[1]},
                      {"p50", p.quantiles[2]},
                      {"p75", p.quantiles[3]},
                      {"p95", p.quantiles[4]}};
    return j;
}

LengthProfile length_profile_from_json(const json& j) {
    return length_profile_from_samples(j.at("samples").get<std::vector<long>>(),
                                       length_unit_from_string(j.at("unit").get<std::string>()));
}

json class_profile_to_json(const ClassProfile& p) {
    json counts = json::object();
    json props = json::object();
    for (const auto& [label, c] : p.counts) counts[label] = c;
    for (const auto& [label, x] : p.proportions) props[label] = x;
    return {{"counts", counts},
            {"proportions", props},
            {"normalized_entropy", p.normalized_entropy},
            {"majority_ratio", p.majority_ratio}};
}

ClassProfile class_profile_from_json(const json& j) {
    std::vector<std::string> labels;
    for (const auto& [label, count] : j.at("counts").items())
        for (size_t i = 0; i < count.get<size_t>(); ++i) labels.push_back(label);
    return class_profile(labels);
}

}  // namespace

DatasetProfile profile_dataset(const std::string& name, std::span<const std::string> texts,
                               std::span<const std::string> labels) {
    DatasetProfile p;
    p.name = name;
    p.char_lengths = length_profile(texts, LengthUnit::kCharacters);
    p.token_lengths = length_profile(texts, LengthUnit::kWhitespaceTokens);

    bool labeled = false;
    for (const auto& l : labels)
        if (!l.empty()) labeled = true;
    if (labeled) {
        p.classes = class_profile(labels);
        p.per_class_token_lengths =
            per_class_length(texts, labels, LengthUnit::kWhitespaceTokens).by_label;
    }
    return p;
}

std::string profile_to_json(const DatasetProfile& p) {
    json j;
    j["kind"] = "dataset_profile";
    j["name"] = p.name;
    j["char_lengths"] = length_profile_to_json(p.char_lengths);
    j["token_lengths"] = length_profile_to_json(p.token_lengths);
    if (p.classes) j["classes"] = class_profile_to_json(*p.classes);
    else j["classes"] = nullptr;
    json per_class = json::object();
    for (const auto& [label, prof] : p.per_class_token_lengths)
        per_class[label] = length_profile_to_json(prof);
    j["per_class_token_lengths"] = per_class;
    return j.dump(2) + "\n";
}

DatasetProfile profile_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::kParse, std::string("profile json: ") + e.what());
    }
    DatasetProfile p;
    p.name = j.value("name", std::string());
    p.char_lengths = length_profile_from_json(j.at("char_lengths"));
    p.token_lengths = length_profile_from_json(j.at("token_lengths"));
    if (j.contains("classes") && !j["classes"].is_null())
        p.classes = class_profile_from_json(j["classes"]);
    if (j.contains("per_class_token_lengths"))
        for (const auto& [label, prof] : j["per_class_token_lengths"].items())
            p.per_class_token_lengths.emplace(label, length_profile_from_json(prof));
    return p;
}

DatasetProfile load_profile_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open profile: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return profile_from_json_text(buf.str());
}

double total_variation(const ClassProfile& a, const ClassProfile& b) {
    std::map<std::string, double> pa(a.proportions.begin(), a.proportions.end());
    std::map<std::string, double> pb(b.proportions.begin(), b.proportions.end());
    double tv = 0;
    for (const auto& [label, x] : pa) {
        auto it = pb.find(label);
        tv += std::abs(x - (it == pb.end() ? 0.0 : it->second));
    }
    for (const auto& [label, x] : pb)
        if (!pa.count(label)) tv += x;
    return 0.5 * tv;
}

}  // namespace crosstask
