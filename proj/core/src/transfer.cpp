#include "crosstask/transfer.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "crosstask/errors.hpp"

namespace crosstask {

using json = nlohmann::json;

size_t GainMatrix::row_index(std::string_view label) const {
    for (size_t i = 0; i < row_labels.size(); ++i)
        if (row_labels[i] == label) return i;
    fail(ErrorCode::kLookup, "unknown gain row: " + std::string(label));
}

size_t GainMatrix::col_index(std::string_view label) const {
    for (size_t i = 0; i < col_labels.size(); ++i)
        if (col_labels[i] == label) return i;
    fail(ErrorCode::kLookup, "unknown gain column: " + std::string(label));
}

GainMatrix gain_matrix(const PerformanceMatrix& m) {
    m.validate();
    if (!m.baseline_row)
        fail(ErrorCode::kConfig, "gain matrix needs a designated baseline row");
    const size_t base = m.row_index(*m.baseline_row);

    GainMatrix g;
    g.baseline_label = *m.baseline_row;
    g.col_labels = m.col_labels;
    g.baseline_values.resize(m.cols());
    for (size_t c = 0; c < m.cols(); ++c) g.baseline_values[c] = m.at(base, c);
    for (size_t r = 0; r < m.rows(); ++r) {
        if (r == base) continue;
        g.row_labels.push_back(m.row_labels[r]);
        for (size_t c = 0; c < m.cols(); ++c)
            g.values.push_back(m.at(r, c) - g.baseline_values[c]);
    }
    return g;
}

AliasMap AliasMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open alias map: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::kParse, std::string("alias map: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::kSchema, "alias map must be a JSON object");
    AliasMap map;
    for (const auto& [row, col] : j.items()) {
        if (col.is_null()) map.entries[row] = std::nullopt;
        else map.entries[row] = col.get<std::string>();
    }
    return map;
}

std::vector<AsymmetryEntry> asymmetry(const GainMatrix& gains, const AliasMap& aliases) {
    // Resolve every row to its evaluation column (or to "not a source").
    std::vector<std::pair<std::string, std::string>> sources;  // row label, eval column
    std::set<std::string> covered_cols;
    for (const auto& row : gains.row_labels) {
        auto it = aliases.entries.find(row);
        if (it != aliases.entries.end()) {
            if (!it->second) continue;  // explicitly marked as not a source dataset
            gains.col_index(*it->second);  // throws kLookup if the alias is bogus
            sources.emplace_back(row, *it->second);
            covered_cols.insert(*it->second);
            continue;
        }
        bool identity = std::find(gains.col_labels.begin(), gains.col_labels.end(), row) !=
                        gains.col_labels.end();
        if (!identity)
            fail(ErrorCode::kConfig,
                 "alias map cannot resolve source row to an evaluation column: " + row);
        sources.emplace_back(row, row);
        covered_cols.insert(row);
    }
    std::sort(sources.begin(), sources.end());

    std::vector<AsymmetryEntry> out;
    for (size_t i = 0; i < sources.size(); ++i) {
        for (size_t j = i + 1; j < sources.size(); ++j) {
            const auto& [row_a, col_a] = sources[i];
            const auto& [row_b, col_b] = sources[j];
            AsymmetryEntry e;
            e.dataset_a = row_a;
            e.dataset_b = row_b;
            e.eval_col_a = col_a;
            e.eval_col_b = col_b;
            e.gain_ab = gains.at(gains.row_index(row_a), gains.col_index(col_b));
            e.gain_ba = gains.at(gains.row_index(row_b), gains.col_index(col_a));
            e.asymmetry = e.gain_ab - *e.gain_ba;
            out.push_back(std::move(e));
        }
    }
    // Columns no source covers can only be reached one way.
    for (const auto& col : gains.col_labels) {
        if (covered_cols.count(col)) continue;
        for (const auto& [row, eval_col] : sources) {
            AsymmetryEntry e;
            e.dataset_a = row;
            e.dataset_b = col;
            e.eval_col_a = eval_col;
            e.eval_col_b = col;
            e.gain_ab = gains.at(gains.row_index(row), gains.col_index(col));
            out.push_back(std::move(e));
        }
    }
    return out;
}

size_t QuadrantTable::count(DomainMatch d, StatsMatch s) const {
    size_t n = 0;
    for (const auto& e : entries)
        if (e.domain == d && e.stats == s) ++n;
    return n;
}

QuadrantTable categorize_pairs(const GainMatrix& gains,
                               const std::map<std::string, DatasetProfile>& profiles,
                               const std::map<std::string, std::string>& domain_map,
                               double ks_threshold, double tv_threshold) {
    auto profile_of = [&](const std::string& label) -> const DatasetProfile& {
        auto it = profiles.find(label);
        if (it == profiles.end()) fail(ErrorCode::kLookup, "missing profile for: " + label);
        return it->second;
    };
    auto domain_of = [&](const std::string& label) -> const std::string& {
        auto it = domain_map.find(label);
        if (it == domain_map.end()) fail(ErrorCode::kLookup, "missing domain for: " + label);
        return it->second;
    };

    QuadrantTable table;
    table.ks_threshold = ks_threshold;
    table.tv_threshold = tv_threshold;
    for (size_t r = 0; r < gains.rows(); ++r) {
        for (size_t c = 0; c < gains.cols(); ++c) {
            const auto& src = gains.row_labels[r];
            const auto& tgt = gains.col_labels[c];
            const auto& ps = profile_of(src);
            const auto& pt = profile_of(tgt);

            QuadrantEntry e;
            e.source = src;
            e.target = tgt;
            e.gain = gains.at(r, c);
            e.domain = domain_of(src) == domain_of(tgt) ? DomainMatch::kSame : DomainMatch::kDifferent;

            std::vector<double> sa(ps.token_lengths.samples.begin(), ps.token_lengths.samples.end());
            std::vector<double> sb(pt.token_lengths.samples.begin(), pt.token_lengths.samples.end());
            e.ks = ks_distance(sa, sb);
            bool similar = e.ks <= ks_threshold;
            if (ps.classes && pt.classes) {
                e.tv = total_variation(*ps.classes, *pt.classes);
                similar = similar && *e.tv <= tv_threshold;
            }
            e.stats = similar ? StatsMatch::kSimilar : StatsMatch::kDifferent;
            table.entries.push_back(std::move(e));
        }
    }
    return table;
}

std::vector<std::pair<std::string, double>> row_diff(const PerformanceMatrix& m,
                                                     const std::string& row_a,
                                                     const std::string& row_b) {
    const size_t a = m.row_index(row_a);
    const size_t b = m.row_index(row_b);
    std::vector<std::pair<std::string, double>> deltas;
    deltas.reserve(m.cols());
    for (size_t c = 0; c < m.cols(); ++c)
        deltas.emplace_back(m.col_labels[c], m.at(a, c) - m.at(b, c));
    return deltas;
}

std::string transfer_to_json(const GainMatrix& gains, const std::vector<AsymmetryEntry>& pairs,
                             const std::optional<QuadrantTable>& quadrants) {
    json j;
    j["kind"] = "transfer_analysis";
    j["baseline"] = gains.baseline_label;
    j["col_labels"] = gains.col_labels;
    j["row_labels"] = gains.row_labels;
    json cells = json::object();
    for (size_t r = 0; r < gains.rows(); ++r) {
        json row = json::object();
        for (size_t c = 0; c < gains.cols(); ++c) row[gains.col_labels[c]] = gains.at(r, c);
        cells[gains.row_labels[r]] = row;
    }
    j["gains"] = cells;
    json base = json::object();
    for (size_t c = 0; c < gains.cols(); ++c) base[gains.col_labels[c]] = gains.baseline_values[c];
    j["baseline_values"] = base;

    json asym = json::array();
    for (const auto& e : pairs) {
        json p;
        p["dataset_a"] = e.dataset_a;
        p["dataset_b"] = e.dataset_b;
        p["eval_col_a"] = e.eval_col_a;
        p["eval_col_b"] = e.eval_col_b;
        p["gain_ab"] = e.gain_ab;
        if (e.gain_ba) p["gain_ba"] = *e.gain_ba;
        else p["gain_ba"] = nullptr;
        if (e.asymmetry) p["asymmetry"] = *e.asymmetry;
        else p["asymmetry"] = nullptr;
        p["two_sided"] = e.gain_ba.has_value();
        asym.push_back(std::move(p));
    }
    j["asymmetry"] = asym;

    if (quadrants) {
        json q;
        q["ks_threshold"] = quadrants->ks_threshold;
        q["tv_threshold"] = quadrants->tv_threshold;
        json entries = json::array();
        for (const auto& e : quadrants->entries) {
            json one;
            one["source"] = e.source;
            one["target"] = e.target;
            one["domain_match"] = e.domain == DomainMatch::kSame ? "same" : "different";
            one["stats_match"] = e.stats == StatsMatch::kSimilar ? "similar" : "different";
            one["gain"] = e.gain;
            one["ks"] = e.ks;
            if (e.tv) one["tv"] = *e.tv;
            else one["tv"] = nullptr;
            entries.push_back(std::move(one));
        }
        q["entries"] = entries;
        j["quadrants"] = q;
    } else {
        j["quadrants"] = nullptr;
    }
    return j.dump(2) + "\n";
}

}  // namespace crosstask
