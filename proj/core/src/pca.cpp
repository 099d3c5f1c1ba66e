#include "crosstask/pca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

NormalizedMatrix zscore_columns(const PerformanceMatrix& m) {
    m.validate();
    const size_t rows = m.rows(), cols = m.cols();
    if (rows < 2) fail(ErrorCode::kArgument, "z-scoring needs at least 2 rows");

    NormalizedMatrix norm;
    norm.row_labels = m.row_labels;
    norm.col_labels = m.col_labels;
    norm.values.resize(rows * cols);
    norm.col_means.resize(cols);
    norm.col_stds.resize(cols);
    norm.zero_variance.assign(cols, false);

    for (size_t c = 0; c < cols; ++c) {
        double mean = 0;
        for (size_t r = 0; r < rows; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(rows);
        double var = 0;
        for (size_t r = 0; r < rows; ++r) {
            const double d = m.at(r, c) - mean;
            var += d * d;
        }
        const double std_dev = std::sqrt(var / static_cast<double>(rows));
        norm.col_means[c] = mean;
        norm.col_stds[c] = std_dev;
        if (std_dev == 0) {
            norm.zero_variance[c] = true;
            for (size_t r = 0; r < rows; ++r) norm.values[r * cols + c] = 0;
        } else {
            for (size_t r = 0; r < rows; ++r)
                norm.values[r * cols + c] = (m.at(r, c) - mean) / std_dev;
        }
    }
    return norm;
}

namespace {

/// Flip so the lowest-index loading with magnitude >= 0.5 * max|loading|
/// is positive. Anchoring on large coordinates keeps the rule stable
/// against rounding noise in near-zero entries.
void apply_sign_convention(std::vector<double>& component) {
    double max_abs = 0;
    for (double v : component) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0) return;
    for (double v : component) {
        if (std::abs(v) >= 0.5 * max_abs) {
            if (v < 0)
                for (double& x : component) x = -x;
            return;
        }
    }
}

}  // namespace

PcaResult pca(const NormalizedMatrix& norm, size_t k) {
    const size_t rows = norm.rows(), cols = norm.cols();
    if (rows < 2) fail(ErrorCode::kArgument, "pca needs at least 2 rows");
    const size_t rank_bound = std::min(rows - 1, cols);
    if (k < 1 || k > rank_bound)
        fail(ErrorCode::kArgument, "k must be in [1, min(I-1, N)] = [1, " +
                                       std::to_string(rank_bound) + "], got " + std::to_string(k));

    Eigen::MatrixXd z(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) z(static_cast<long>(r), static_cast<long>(c)) = norm.at(r, c);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const Eigen::MatrixXd& v = svd.matrixV();  // cols x min(rows, cols)

    double total = 0;
    for (long i = 0; i < sigma.size(); ++i) total += sigma(i) * sigma(i);
    if (!(total > 0)) fail(ErrorCode::kNumeric, "matrix has no variance to decompose");

    PcaResult res;
    res.row_labels = norm.row_labels;
    res.col_labels = norm.col_labels;
    res.zero_variance = norm.zero_variance;
    res.k = k;
    res.components.resize(k * cols);
    res.explained_variance_ratio.resize(k);

    for (size_t comp = 0; comp < k; ++comp) {
        std::vector<double> loading(cols);
        for (size_t c = 0; c < cols; ++c)
            loading[c] = v(static_cast<long>(c), static_cast<long>(comp));
        apply_sign_convention(loading);
        std::copy(loading.begin(), loading.end(), res.components.begin() + static_cast<long>(comp * cols));
        const double s = sigma(static_cast<long>(comp));
        res.explained_variance_ratio[comp] = s * s / total;
    }

    res.projections.resize(rows * k);
    for (size_t r = 0; r < rows; ++r)
        for (size_t comp = 0; comp < k; ++comp) {
            double dot = 0;
            for (size_t c = 0; c < cols; ++c) dot += norm.at(r, c) * res.loading(comp, c);
            res.projections[r * k + comp] = dot;
        }
    return res;
}

TraitReport label_components(const PcaResult& res, double threshold) {
    if (threshold <= 0 || threshold >= 1)
        fail(ErrorCode::kArgument, "threshold must be in (0, 1)");

    TraitReport report;
    report.threshold = threshold;
    const size_t cols = res.col_labels.size();
    for (size_t comp = 0; comp < res.k; ++comp) {
        TraitComponent tc;
        tc.index = comp;

        double max_positive = 0;
        for (size_t c = 0; c < cols; ++c)
            if (!res.zero_variance[c]) max_positive = std::max(max_positive, res.loading(comp, c));
        for (size_t c = 0; c < cols; ++c) {
            tc.loadings.emplace_back(res.col_labels[c], res.loading(comp, c));
            if (!res.zero_variance[c] && max_positive > 0 &&
                res.loading(comp, c) >= threshold * max_positive)
                tc.positive_group.push_back(res.col_labels[c]);
        }
        std::stable_sort(tc.loadings.begin(), tc.loadings.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (size_t r = 0; r < res.row_labels.size(); ++r)
            tc.projections.emplace_back(res.row_labels[r], res.projection(r, comp));
        report.components.push_back(std::move(tc));
    }
    return report;
}

std::string pca_result_to_json(const PcaResult& res, const TraitReport& report) {
    json j;
    j["kind"] = "pca_result";
    j["k"] = res.k;
    j["row_labels"] = res.row_labels;
    j["col_labels"] = res.col_labels;
    j["explained_variance_ratio"] = res.explained_variance_ratio;
    double cumulative = 0;
    for (double r : res.explained_variance_ratio) cumulative += r;
    j["cumulative_explained_variance"] = cumulative;

    json comps = json::array();
    for (const auto& tc : report.components) {
        json c;
        c["index"] = tc.index;
        c["name"] = tc.name;
        json loadings = json::array();
        for (const auto& [label, value] : tc.loadings) loadings.push_back({{"task", label}, {"loading", value}});
        c["loadings"] = loadings;
        c["positive_group"] = tc.positive_group;
        json proj = json::array();
        for (const auto& [label, value] : tc.projections) proj.push_back({{"model", label}, {"weight", value}});
        c["projections"] = proj;
        comps.push_back(std::move(c));
    }
    j["components"] = comps;
    j["threshold"] = report.threshold;
    json zv = json::array();
    for (size_t c = 0; c < res.col_labels.size(); ++c)
        if (res.zero_variance[c]) zv.push_back(res.col_labels[c]);
    j["zero_variance_columns"] = zv;
    return j.dump(2) + "\n";
}

}  // namespace crosstask
