#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crosstask {

enum class LengthUnit { kCharacters, kWhitespaceTokens };

const char* to_string(LengthUnit u);
LengthUnit length_unit_from_string(const std::string& s);

/// Length of one text in the given unit. Whitespace tokens are maximal
/// non-whitespace runs.
long text_length(std::string_view text, LengthUnit unit);

struct LengthProfile {
    LengthUnit unit = LengthUnit::kWhitespaceTokens;
    std::vector<long> samples;  // input order
    long min = 0;
    long max = 0;
    double mean = 0;
    double median = 0;                 // == quantile(0.5)
    std::array<double, 5> quantiles{};  // 5 / 25 / 50 / 75 / 95

    size_t size() const { return samples.size(); }
};

LengthProfile length_profile(std::span<const std::string> texts, LengthUnit unit);
LengthProfile length_profile_from_samples(std::vector<long> samples, LengthUnit unit);

/// Linear-interpolation quantile over the full sorted sample
/// (h = p * (n - 1); v = s[floor(h)] + frac(h) * (s[floor(h)+1] - s[floor(h)])).
double quantile_sorted(std::span<const long> sorted, double p);
double quantile_sorted(std::span<const double> sorted, double p);

struct ClassProfile {
    std::vector<std::pair<std::string, size_t>> counts;  // sorted by label
    std::vector<std::pair<std::string, double>> proportions;
    double normalized_entropy = 0;  // H(p) / log(#classes); 0 for a single class
    double majority_ratio = 0;
};

ClassProfile class_profile(std::span<const std::string> labels);

struct KdeCurve {
    std::vector<double> grid;     // 512 ascending points spanning [min-5h, max+5h]
    std::vector<double> density;  // same length
    double bandwidth = 0;
};

/// Gaussian kernel density at x with fixed (input-order) summation:
/// (1/(n h)) * sum phi((x - s_i)/h).
double kde_pdf(std::span<const double> samples, double bandwidth, double x);

/// Silverman's rule: 0.9 * min(sigma, IQR/1.34) * n^(-1/5), population
/// sigma; falls back to 1 in the sample's unit when the rule degenerates
/// to zero.
double silverman_bandwidth(std::span<const double> samples);

KdeCurve kde(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt);

/// Two-sample Kolmogorov-Smirnov distance: sup |F_a - F_b| over the
/// empirical CDFs. Exact (single division of an integer sup-numerator).
double ks_distance(std::span<const double> a, std::span<const double> b);

struct PerClassLength {
    std::map<std::string, LengthProfile> by_label;
    std::vector<std::string> missing_labels;  // expected but absent classes
};

PerClassLength per_class_length(std::span<const std::string> texts,
                                std::span<const std::string> labels, LengthUnit unit,
                                std::span<const std::string> expected_labels = {});

/// Largest seeded subsample (without replacement) whose realized class
/// proportions match `target` within one example per class. Classes
/// absent from `target` are dropped. Returns ascending kept indices.
std::vector<size_t> rebalance_plan(std::span<const std::string> labels,
                                   const std::map<std::string, double>& target, uint64_t seed);

/// (median(adapted) - median(base)) / (median(train) - median(base)),
/// clipped to [-0.5, 1.5]. 0 = pure base behavior, 1 = pure training-data
/// behavior.
double interpolation_index(const LengthProfile& base, const LengthProfile& train,
                           const LengthProfile& adapted);

/// Everything the transfer quadrant analysis needs to know about one
/// dataset: both length distributions, class proportions and per-class
/// length stats.
struct DatasetProfile {
    std::string name;
    LengthProfile char_lengths;
    LengthProfile token_lengths;
    std::optional<ClassProfile> classes;
    std::map<std::string, LengthProfile> per_class_token_lengths;
};

DatasetProfile profile_dataset(const std::string& name, std::span<const std::string> texts,
                               std::span<const std::string> labels);

std::string profile_to_json(const DatasetProfile& p);
DatasetProfile profile_from_json_text(const std::string& text);
DatasetProfile load_profile_json(const std::string& path);

/// Total variation distance between two class-proportion maps (labels
/// missing on one side count with proportion 0).
double total_variation(const ClassProfile& a, const ClassProfile& b);

}  // namespace crosstask
