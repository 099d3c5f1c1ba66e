// crosstask: build performance matrices from eval records, factorize them
// into latent traits, and quantify the dataset statistics behind
// cross-task transfer effects.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crosstask/cls_analysis.hpp"
#include "crosstask/conllu.hpp"
#include "crosstask/datasets.hpp"
#include "crosstask/dist_stats.hpp"
#include "crosstask/errors.hpp"
#include "crosstask/eval_records.hpp"
#include "crosstask/lingfeat.hpp"
#include "crosstask/manifest.hpp"
#include "crosstask/matrix.hpp"
#include "crosstask/model_client.hpp"
#include "crosstask/pca.hpp"
#include "crosstask/similarity.hpp"
#include "crosstask/svg_report.hpp"
#include "crosstask/transfer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace crosstask;

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    uint64_t seed = 0;
    std::string config_path;

    // Defaults loadable from --config; explicit flags win.
    json config = json::object();

    double config_double(const char* key, double fallback) const {
        return config.contains(key) ? config[key].get<double>() : fallback;
    }
    std::string config_string(const char* key, const std::string& fallback) const {
        return config.contains(key) ? config[key].get<std::string>() : fallback;
    }
};

std::string out_path(const GlobalOptions& g, const std::string& name) {
    return (fs::path(g.out_dir) / name).string();
}

void ensure_out_dir(const GlobalOptions& g) {
    std::error_code ec;
    fs::create_directories(g.out_dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create out dir: " + g.out_dir);
}

std::string file_stem(const std::string& path) {
    return fs::path(path).stem().string();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// figure emission shared by the producing subcommands and `report`

std::vector<std::string> emit_pca_figures(const json& j, const GlobalOptions& g,
                                          const std::string& stem) {
    std::vector<std::string> written;
    std::vector<double> ratios = j.at("explained_variance_ratio").get<std::vector<double>>();
    write_text_file(out_path(g, stem + "_scree.svg"), svg_scree(ratios, "Explained variance"));
    written.push_back(stem + "_scree.svg");

    const auto cols = j.at("col_labels").get<std::vector<std::string>>();
    const auto rows = j.at("row_labels").get<std::vector<std::string>>();
    std::vector<std::string> comp_names;
    std::vector<double> loadings;
    std::vector<double> projections(rows.size() * j.at("components").size());
    for (const auto& comp : j.at("components")) {
        comp_names.push_back("PC" + std::to_string(comp.at("index").get<int>()));
        std::map<std::string, double> by_task;
        for (const auto& l : comp.at("loadings"))
            by_task[l.at("task").get<std::string>()] = l.at("loading").get<double>();
        for (const auto& c : cols) loadings.push_back(by_task.at(c));
        std::map<std::string, double> by_model;
        for (const auto& p : comp.at("projections"))
            by_model[p.at("model").get<std::string>()] = p.at("weight").get<double>();
        for (size_t r = 0; r < rows.size(); ++r)
            projections[r * static_cast<size_t>(j.at("components").size()) +
                        (comp_names.size() - 1)] = by_model.at(rows[r]);
    }
    write_text_file(out_path(g, stem + "_loadings.svg"),
                    svg_gain_table(comp_names, cols, loadings, "Component loadings"));
    written.push_back(stem + "_loadings.svg");
    write_text_file(out_path(g, stem + "_projections.svg"),
                    svg_gain_table(rows, comp_names, projections, "Model projection weights"));
    written.push_back(stem + "_projections.svg");
    return written;
}

std::vector<std::string> emit_transfer_figures(const json& j, const GlobalOptions& g,
                                               const std::string& stem) {
    const auto rows = j.at("row_labels").get<std::vector<std::string>>();
    const auto cols = j.at("col_labels").get<std::vector<std::string>>();
    std::vector<double> gains;
    for (const auto& r : rows)
        for (const auto& c : cols) gains.push_back(j.at("gains").at(r).at(c).get<double>());
    write_text_file(out_path(g, stem + "_gains.svg"),
                    svg_gain_table(rows, cols, gains, "Transfer gains vs baseline"));
    return {stem + "_gains.svg"};
}

std::vector<std::string> emit_confusion_figures(const json& j, const GlobalOptions& g,
                                                const std::string& stem) {
    auto labels = j.at("labels").get<std::vector<std::string>>();
    std::vector<std::string> pred_labels = labels;
    pred_labels.push_back("unparseable");
    std::vector<double> values;
    for (const auto& row : j.at("row_normalized"))
        for (const auto& v : row) values.push_back(v.get<double>());
    ColorScale scale;
    scale.min_value = 0;
    scale.max_value = 1;
    write_text_file(out_path(g, stem + "_confusion.svg"),
                    svg_heatmap(labels, pred_labels, values, scale,
                                "Confusion (row-normalized, gold x predicted)"));
    return {stem + "_confusion.svg"};
}

std::vector<std::string> emit_similarity_figures(const json& j, const GlobalOptions& g,
                                                 const std::string& stem) {
    const auto labels = j.at("labels").get<std::vector<std::string>>();
    std::vector<double> values;
    for (const auto& row : j.at("values"))
        for (const auto& v : row) values.push_back(v.get<double>());
    const std::string kind = j.at("similarity_kind").get<std::string>();
    write_text_file(out_path(g, stem + "_similarity.svg"),
                    svg_gain_table(labels, labels, values, kind + " similarity"));
    return {stem + "_similarity.svg"};
}

std::vector<std::string> emit_profile_figures(const json& j, const GlobalOptions& g,
                                              const std::string& stem) {
    std::vector<NamedCurve> curves;
    const auto& tokens = j.at("token_lengths");
    std::vector<double> samples;
    for (const auto& s : tokens.at("samples")) samples.push_back(s.get<double>());
    curves.push_back({"all", kde(samples)});
    if (j.contains("per_class_token_lengths"))
        for (const auto& [label, prof] : j.at("per_class_token_lengths").items()) {
            std::vector<double> cls;
            for (const auto& s : prof.at("samples")) cls.push_back(s.get<double>());
            curves.push_back({label, kde(cls)});
        }
    write_text_file(out_path(g, stem + "_kde.svg"),
                    svg_kde_curves(curves, "Token length KDE: " + j.value("name", stem)));
    return {stem + "_kde.svg"};
}

std::vector<std::string> emit_figures_for(const json& j, const GlobalOptions& g,
                                          const std::string& stem) {
    const std::string kind = j.value("kind", "");
    if (kind == "pca_result") return emit_pca_figures(j, g, stem);
    if (kind == "transfer_analysis") return emit_transfer_figures(j, g, stem);
    if (kind == "confusion_matrix") return emit_confusion_figures(j, g, stem);
    if (kind == "similarity_matrix") return emit_similarity_figures(j, g, stem);
    if (kind == "dataset_profile") return emit_profile_figures(j, g, stem);
    fail(ErrorCode::kSchema, "artifact has no renderable kind: '" + kind + "'");
}

// ---------------------------------------------------------------------------
// subcommands

int run_aggregate(const GlobalOptions& g, const std::string& records_path,
                  const std::string& out_name) {
    ensure_out_dir(g);
    auto records = load_eval_records(records_path);
    auto matrix = aggregate_records(records);
    write_matrix_csv(matrix, out_path(g, out_name));

    Manifest m{"aggregate", {records_path}, {{"records", records_path}}, {out_name}};
    m.write(g.out_dir);
    return 0;
}

int run_pca(const GlobalOptions& g, const std::string& matrix_path, size_t k, double threshold,
            const std::string& out_name) {
    ensure_out_dir(g);
    auto matrix = load_matrix_csv(matrix_path);
    auto norm = zscore_columns(matrix);
    auto result = pca(norm, k);
    auto report = label_components(result, threshold);
    const std::string payload = pca_result_to_json(result, report);
    write_text_file(out_path(g, out_name), payload);

    auto figures = emit_pca_figures(json::parse(payload), g, file_stem(out_name));
    Manifest m{"pca",
               {matrix_path},
               {{"matrix", matrix_path},
                {"components", std::to_string(k)},
                {"threshold", fmt_double(threshold)}},
               {out_name}};
    m.outputs.insert(m.outputs.end(), figures.begin(), figures.end());
    m.write(g.out_dir);
    return 0;
}

int run_transfer(const GlobalOptions& g, const std::string& matrix_path,
                 const std::string& baseline, const std::string& aliases_path,
                 const std::string& profiles_dir, const std::string& domains_path,
                 double ks_threshold, double tv_threshold, const std::string& out_name) {
    ensure_out_dir(g);
    auto matrix = load_matrix_csv(matrix_path);
    if (!baseline.empty()) matrix.baseline_row = baseline;
    auto gains = gain_matrix(matrix);

    std::vector<AsymmetryEntry> pairs;
    if (!aliases_path.empty()) pairs = asymmetry(gains, AliasMap::load(aliases_path));

    std::optional<QuadrantTable> quadrants;
    if (!profiles_dir.empty()) {
        if (domains_path.empty())
            fail(ErrorCode::kConfig, "--profiles needs --domains for the quadrant table");
        std::map<std::string, DatasetProfile> profiles;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(profiles_dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto p = load_profile_json(f.string());
            const std::string key = p.name.empty() ? f.stem().string() : p.name;
            profiles[key] = std::move(p);
        }
        json dj = json::parse(read_text_file(domains_path));
        std::map<std::string, std::string> domains;
        for (const auto& [k, v] : dj.items()) domains[k] = v.get<std::string>();
        quadrants = categorize_pairs(gains, profiles, domains, ks_threshold, tv_threshold);
    }

    const std::string payload = transfer_to_json(gains, pairs, quadrants);
    write_text_file(out_path(g, out_name), payload);
    auto figures = emit_transfer_figures(json::parse(payload), g, file_stem(out_name));

    Manifest m{"transfer", {matrix_path}, {{"matrix", matrix_path}}, {out_name}};
    if (!aliases_path.empty()) {
        m.input_paths.push_back(aliases_path);
        m.parameters["aliases"] = aliases_path;
    }
    if (!profiles_dir.empty()) {
        m.parameters["profiles"] = profiles_dir;
        m.parameters["domains"] = domains_path;
        m.parameters["ks_threshold"] = fmt_double(ks_threshold);
        m.parameters["tv_threshold"] = fmt_double(tv_threshold);
    }
    if (!baseline.empty()) m.parameters["baseline"] = baseline;
    m.outputs.insert(m.outputs.end(), figures.begin(), figures.end());
    m.write(g.out_dir);
    return 0;
}

int run_profile(const GlobalOptions& g, const std::string& dataset_path, const std::string& unit,
                const std::string& name, const std::string& out_name) {
    ensure_out_dir(g);
    auto ds = load_dataset_jsonl(dataset_path);
    length_unit_from_string(unit);  // validated; both units are profiled anyway
    auto profile =
        profile_dataset(name.empty() ? file_stem(dataset_path) : name, ds.texts, ds.labels);
    const std::string payload = profile_to_json(profile);
    write_text_file(out_path(g, out_name), payload);
    auto figures = emit_profile_figures(json::parse(payload), g, file_stem(out_name));

    Manifest m{"profile",
               {dataset_path},
               {{"dataset", dataset_path}, {"unit", unit}},
               {out_name}};
    m.outputs.insert(m.outputs.end(), figures.begin(), figures.end());
    m.write(g.out_dir);
    return 0;
}

std::map<std::string, double> parse_target_spec(const std::string& spec) {
    std::map<std::string, double> target;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos)
            fail(ErrorCode::kArgument, "target entries must be label:proportion, got: " + item);
        try {
            target[item.substr(0, colon)] = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            fail(ErrorCode::kArgument, "bad proportion in target entry: " + item);
        }
    }
    if (target.empty()) fail(ErrorCode::kArgument, "empty rebalance target");
    return target;
}

int run_rebalance(const GlobalOptions& g, const std::string& dataset_path,
                  const std::string& target_spec, uint64_t seed, const std::string& out_name) {
    ensure_out_dir(g);
    auto ds = load_dataset_jsonl(dataset_path);
    auto target = parse_target_spec(target_spec);
    auto kept = rebalance_plan(ds.labels, target, seed);

    LabeledDataset out;
    out.domain_tag = ds.domain_tag;
    for (size_t idx : kept) {
        out.ids.push_back(ds.ids[idx]);
        out.texts.push_back(ds.texts[idx]);
        out.labels.push_back(ds.labels[idx]);
    }
    write_dataset_jsonl(out, out_path(g, out_name));

    json summary;
    summary["kind"] = "rebalance_summary";
    summary["kept"] = kept.size();
    summary["total"] = ds.size();
    json realized = json::object();
    for (const auto& [label, count] : class_profile(out.labels).counts) realized[label] = count;
    summary["realized_counts"] = realized;
    write_text_file(out_path(g, "rebalance_summary.json"), summary.dump(2) + "\n");

    Manifest m{"rebalance",
               {dataset_path},
               {{"dataset", dataset_path}, {"target", target_spec}, {"seed", std::to_string(seed)}},
               {out_name, "rebalance_summary.json"}};
    m.write(g.out_dir);
    return 0;
}

int run_confusion(const GlobalOptions& g, const std::string& records_path,
                  const std::string& labels_spec, const std::string& out_name) {
    ensure_out_dir(g);
    auto records = load_eval_records(records_path, /*require_score=*/false);
    std::vector<std::string> labels;
    std::istringstream in(labels_spec);
    std::string item;
    while (std::getline(in, item, ',')) labels.push_back(item);

    std::vector<std::string> predictions, golds;
    for (const auto& r : records) {
        predictions.push_back(r.prediction);
        golds.push_back(r.gold);
    }
    auto cm = confusion_matrix(predictions, golds, labels);
    auto metrics = bias_metrics(cm);
    const std::string payload = confusion_to_json(cm, metrics);
    write_text_file(out_path(g, out_name), payload);
    auto figures = emit_confusion_figures(json::parse(payload), g, file_stem(out_name));

    Manifest m{"confusion",
               {records_path},
               {{"records", records_path}, {"labels", labels_spec}},
               {out_name}};
    m.outputs.insert(m.outputs.end(), figures.begin(), figures.end());
    m.write(g.out_dir);
    return 0;
}

int run_similarity(const GlobalOptions& g, const std::string& embeddings_dir,
                   const std::string& kind_name, const std::string& out_name) {
    ensure_out_dir(g);
    SimilarityKind kind;
    if (kind_name == "semantic") kind = SimilarityKind::kSemantic;
    else if (kind_name == "stylistic") kind = SimilarityKind::kStylistic;
    else fail(ErrorCode::kArgument, "kind must be semantic or stylistic");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(embeddings_dir))
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2)
        fail(ErrorCode::kArgument, "similarity needs at least two embedding files in " +
                                       embeddings_dir);
    std::map<std::string, EmbeddingSet> sets;
    std::vector<std::string> input_paths;
    for (const auto& f : files) {
        sets[f.stem().string()] = load_embeddings_jsonl(f.string());
        input_paths.push_back(f.string());
    }

    auto matrix = similarity_matrix(sets, kind);
    const std::string payload = similarity_to_json(matrix);
    write_text_file(out_path(g, out_name), payload);
    auto figures = emit_similarity_figures(json::parse(payload), g, file_stem(out_name));

    Manifest m{"similarity", input_paths,
               {{"embeddings", embeddings_dir}, {"kind", kind_name}}, {out_name}};
    m.outputs.insert(m.outputs.end(), figures.begin(), figures.end());
    m.write(g.out_dir);
    return 0;
}

struct Problem {
    std::string id;
    std::string text;
    std::string solution;  // optional; falls back to text for operation tags
};

std::vector<Problem> load_problems(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open problems file: " + path);
    std::vector<Problem> problems;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, "problems line " + std::to_string(line_no) + ": " + e.what());
        }
        Problem p;
        p.id = j.value("id", std::to_string(problems.size()));
        p.text = j.value("text", std::string());
        p.solution = j.value("solution", std::string());
        problems.push_back(std::move(p));
    }
    if (problems.empty()) fail(ErrorCode::kEmptyInput, "no problems in " + path);
    return problems;
}

std::vector<int> scores_for(const std::vector<Problem>& problems, const std::string& records_path) {
    auto records = load_eval_records(records_path);
    std::map<std::string, int> by_id;
    for (const auto& r : records) by_id[r.example_id] = *r.score;
    std::vector<int> scores;
    for (const auto& p : problems) {
        auto it = by_id.find(p.id);
        if (it == by_id.end())
            fail(ErrorCode::kSchema, "no record in " + records_path + " for problem " + p.id);
        scores.push_back(it->second);
    }
    return scores;
}

int run_lingfeat(const GlobalOptions& g, const std::string& problems_path,
                 const std::string& parses_path, const std::string& base_path,
                 const std::string& adapter_path, const std::string& key_name,
                 const std::string& lexicon_path, const std::string& out_name) {
    ensure_out_dir(g);
    auto problems = load_problems(problems_path);
    auto base = scores_for(problems, base_path);
    auto adapter = scores_for(problems, adapter_path);

    Lexicons lex = lexicon_path.empty() ? Lexicons::defaults() : Lexicons::load(lexicon_path);

    std::vector<std::string> ids;
    std::vector<MathFeatures> features;
    std::vector<std::set<OpTag>> tags;
    for (const auto& p : problems) {
        ids.push_back(p.id);
        features.push_back(extract_math_features(p.text, lex));
        tags.push_back(operation_tags(p.solution.empty() ? p.text : p.solution));
    }
    auto correlations = feature_improvement_correlation(features, base, adapter);

    std::optional<ImportanceRatioTable> importance;
    if (!parses_path.empty()) {
        auto sentences = conllu::load_conllu(parses_path);
        auto docs = conllu::group_by_document(sentences);
        if (docs.size() != problems.size())
            fail(ErrorCode::kSchema, "parses hold " + std::to_string(docs.size()) +
                                         " documents for " + std::to_string(problems.size()) +
                                         " problems");
        // Align by newdoc id when ids match; otherwise keep file order.
        std::map<std::string, size_t> doc_by_id;
        for (size_t i = 0; i < docs.size(); ++i) doc_by_id[docs[i].id] = i;
        std::vector<std::vector<conllu::Sentence>> per_problem;
        bool ids_match = true;
        for (const auto& p : problems) ids_match = ids_match && doc_by_id.count(p.id) > 0;
        for (size_t i = 0; i < problems.size(); ++i)
            per_problem.push_back(ids_match ? docs[doc_by_id[problems[i].id]].sentences
                                            : docs[i].sentences);
        const auto key = key_name == "upos" ? ImportanceKey::kUpos : ImportanceKey::kDeprel;
        if (key_name != "upos" && key_name != "deprel")
            fail(ErrorCode::kArgument, "key must be deprel or upos");
        importance = relation_importance(per_problem, base, adapter, key);
    }

    const std::string payload =
        lingfeat_to_json(ids, features, correlations, importance, tags);
    write_text_file(out_path(g, out_name), payload);

    Manifest m{"lingfeat",
               {problems_path, base_path, adapter_path},
               {{"problems", problems_path},
                {"base", base_path},
                {"adapter", adapter_path},
                {"key", key_name}},
               {out_name}};
    if (!parses_path.empty()) {
        m.input_paths.push_back(parses_path);
        m.parameters["parses"] = parses_path;
    }
    if (!lexicon_path.empty()) {
        m.input_paths.push_back(lexicon_path);
        m.parameters["lexicon"] = lexicon_path;
    }
    m.write(g.out_dir);
    return 0;
}

int run_judge(const GlobalOptions& g, const std::string& records_path, const EndpointConfig& cfg,
              const std::string& cache_path, const std::string& out_name) {
    ensure_out_dir(g);
    auto records = load_eval_records(records_path, /*require_score=*/false);

    ScoreCache cache(cache_path.empty() ? out_path(g, "judge_cache.jsonl") : cache_path);
    ModelClient client(cfg);
    auto outcomes = client.judge_records(records, &cache);

    size_t failures = 0;
    json errors = json::array();
    for (size_t i = 0; i < records.size(); ++i) {
        if (outcomes[i].score) {
            records[i].score = *outcomes[i].score;
        } else {
            ++failures;
            errors.push_back({{"example_id", records[i].example_id},
                              {"model_id", records[i].model_id},
                              {"task_id", records[i].task_id},
                              {"error", outcomes[i].error}});
        }
    }
    write_eval_records(records, out_path(g, out_name));
    json error_report;
    error_report["kind"] = "judge_errors";
    error_report["failed"] = failures;
    error_report["total"] = records.size();
    error_report["items"] = errors;
    write_text_file(out_path(g, "judge_errors.json"), error_report.dump(2) + "\n");

    Manifest m{"judge",
               {records_path},
               {{"records", records_path},
                {"endpoint", cfg.base_url},
                {"model", cfg.model},
                {"max_in_flight", std::to_string(cfg.max_in_flight)}},
               {out_name, "judge_errors.json"}};
    m.write(g.out_dir);

    if (failures > 0) {
        std::cerr << json{{"error",
                           {{"code", "judge_partial_failure"},
                            {"message", std::to_string(failures) + " of " +
                                            std::to_string(records.size()) +
                                            " records failed; see judge_errors.json"}}}}
                         .dump()
                  << '\n';
        return 1;
    }
    return 0;
}

int run_report(const GlobalOptions& g, const std::vector<std::string>& inputs) {
    ensure_out_dir(g);
    Manifest m{"report", {}, {}, {}};
    for (const auto& path : inputs) {
        json j;
        try {
            j = json::parse(read_text_file(path));
        } catch (const json::exception& e) {
            fail(ErrorCode::kParse, path + ": " + e.what());
        }
        auto written = emit_figures_for(j, g, file_stem(path));
        m.input_paths.push_back(path);
        m.outputs.insert(m.outputs.end(), written.begin(), written.end());
    }
    m.write(g.out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-task transfer analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out-dir", g.out_dir, "directory artifacts are written to");
    app.add_option("--seed", g.seed, "PRNG seed for sampling operations");
    app.add_option("--config", g.config_path, "JSON file with default thresholds and paths");

    // aggregate
    std::string agg_records, agg_out = "matrix.csv";
    auto* agg = app.add_subcommand("aggregate", "eval records -> performance matrix csv");
    agg->add_option("--records", agg_records, "scored records.jsonl")->required();
    agg->add_option("--out", agg_out, "output csv name");

    // pca
    std::string pca_matrix, pca_out = "pca.json";
    size_t pca_k = 4;
    double pca_threshold = 0.5;
    auto* pca_cmd = app.add_subcommand("pca", "factorize the performance matrix into traits");
    pca_cmd->add_option("--matrix", pca_matrix, "performance matrix csv")->required();
    auto* pca_k_opt = pca_cmd->add_option("--components", pca_k, "number of components (default 4)");
    auto* pca_t_opt = pca_cmd->add_option("--threshold", pca_threshold, "group threshold (default 0.5)");
    pca_cmd->add_option("--out", pca_out, "output json name");

    // transfer
    std::string tr_matrix, tr_baseline, tr_aliases, tr_profiles, tr_domains, tr_out = "transfer.json";
    double tr_ks = 0.2, tr_tv = 0.2;
    auto* tr = app.add_subcommand("transfer", "gains, asymmetry and quadrant categorization");
    tr->add_option("--matrix", tr_matrix, "performance matrix csv")->required();
    tr->add_option("--baseline", tr_baseline, "baseline row label (default: the 'None' row)");
    auto* tr_alias_opt = tr->add_option("--aliases", tr_aliases, "source->eval column alias json");
    tr->add_option("--profiles", tr_profiles, "directory of dataset profile jsons");
    auto* tr_dom_opt = tr->add_option("--domains", tr_domains, "dataset->domain json");
    auto* tr_ks_opt = tr->add_option("--ks-threshold", tr_ks, "KS similarity cut (default 0.2)");
    auto* tr_tv_opt = tr->add_option("--tv-threshold", tr_tv, "TV similarity cut (default 0.2)");
    tr->add_option("--out", tr_out, "output json name");

    // profile
    std::string pr_dataset, pr_unit = "tokens", pr_name, pr_out = "profile.json";
    auto* pr = app.add_subcommand("profile", "length/class distribution profile of a dataset");
    pr->add_option("--dataset", pr_dataset, "dataset.jsonl")->required();
    pr->add_option("--unit", pr_unit, "tokens|chars (figure unit; both are profiled)");
    pr->add_option("--name", pr_name, "dataset name (default: file stem)");
    pr->add_option("--out", pr_out, "output json name");

    // rebalance
    std::string rb_dataset, rb_target, rb_out = "rebalanced.jsonl";
    uint64_t rb_seed = 0;
    auto* rb = app.add_subcommand("rebalance", "subsample a dataset to target class proportions");
    rb->add_option("--dataset", rb_dataset, "dataset.jsonl")->required();
    rb->add_option("--target", rb_target, "label:prop,label:prop,... (sums to 1)")->required();
    auto* rb_seed_opt = rb->add_option("--seed", rb_seed, "sampling seed (default: global --seed)");
    rb->add_option("--out", rb_out, "output jsonl name");

    // confusion
    std::string cf_records, cf_labels, cf_out = "confusion.json";
    auto* cf = app.add_subcommand("confusion", "confusion matrix and prediction-bias metrics");
    cf->add_option("--records", cf_records, "records.jsonl with predictions and golds")->required();
    cf->add_option("--labels", cf_labels, "comma-separated label set")->required();
    cf->add_option("--out", cf_out, "output json name");

    // similarity
    std::string sim_dir, sim_kind = "semantic", sim_out = "similarity.json";
    auto* sim = app.add_subcommand("similarity", "dataset-pair centroid cosine matrix");
    sim->add_option("--embeddings", sim_dir, "directory of <dataset>.jsonl embedding files")
        ->required();
    sim->add_option("--kind", sim_kind, "semantic|stylistic");
    sim->add_option("--out", sim_out, "output json name");

    // lingfeat
    std::string lf_problems, lf_parses, lf_base, lf_adapter, lf_key = "deprel", lf_lexicon,
                lf_out = "lingfeat.json";
    auto* lf = app.add_subcommand("lingfeat", "math features, correlations, importance ratios");
    lf->add_option("--problems", lf_problems, "problems jsonl (id/text[/solution])")->required();
    lf->add_option("--parses", lf_parses, "CoNLL-U parses grouped per problem");
    lf->add_option("--base", lf_base, "base-model scored records")->required();
    lf->add_option("--adapter", lf_adapter, "adapter scored records")->required();
    lf->add_option("--key", lf_key, "deprel|upos");
    auto* lf_lex_opt = lf->add_option("--lexicon", lf_lexicon, "lexicon json (default: built-ins)");
    lf->add_option("--out", lf_out, "output json name");

    // judge
    std::string jd_records, jd_endpoint, jd_model, jd_cache, jd_out = "scored.jsonl";
    EndpointConfig jd_cfg;
    auto* jd = app.add_subcommand("judge", "score records with an LLM judge endpoint");
    jd->add_option("--records", jd_records, "records.jsonl without scores")->required();
    jd->add_option("--endpoint", jd_endpoint, "base url, e.g. http://host:port/v1")->required();
    jd->add_option("--model", jd_model, "judge model name")->required();
    jd->add_option("--cache", jd_cache, "score cache path (default: <out-dir>/judge_cache.jsonl)");
    jd->add_option("--max-in-flight", jd_cfg.max_in_flight, "concurrent request bound");
    jd->add_option("--retries", jd_cfg.retry_budget, "retry budget per item");
    jd->add_option("--timeout", jd_cfg.timeout_seconds, "per-request timeout seconds");
    jd->add_option("--backoff-ms", jd_cfg.backoff_initial_ms, "initial backoff, doubles per retry");
    jd->add_option("--auth-env", jd_cfg.auth_env, "env var holding the bearer token");
    jd->add_option("--out", jd_out, "output records name");

    // report
    std::vector<std::string> rp_inputs;
    auto* rp = app.add_subcommand("report", "render SVG figures from result jsons");
    rp->add_option("--in", rp_inputs, "result json (repeatable)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (!g.config_path.empty()) {
            g.config = json::parse(read_text_file(g.config_path));
            if (!pca_t_opt->count()) pca_threshold = g.config_double("pca_threshold", pca_threshold);
            if (!pca_k_opt->count() && g.config.contains("components"))
                pca_k = g.config["components"].get<size_t>();
            if (!tr_ks_opt->count()) tr_ks = g.config_double("ks_threshold", tr_ks);
            if (!tr_tv_opt->count()) tr_tv = g.config_double("tv_threshold", tr_tv);
            if (!tr_alias_opt->count()) tr_aliases = g.config_string("aliases", tr_aliases);
            if (!tr_dom_opt->count()) tr_domains = g.config_string("domains", tr_domains);
            if (!lf_lex_opt->count()) lf_lexicon = g.config_string("lexicons", lf_lexicon);
        }
        if (!rb_seed_opt->count()) rb_seed = g.seed;

        if (agg->parsed()) return run_aggregate(g, agg_records, agg_out);
        if (pca_cmd->parsed()) return run_pca(g, pca_matrix, pca_k, pca_threshold, pca_out);
        if (tr->parsed())
            return run_transfer(g, tr_matrix, tr_baseline, tr_aliases, tr_profiles, tr_domains,
                                tr_ks, tr_tv, tr_out);
        if (pr->parsed()) return run_profile(g, pr_dataset, pr_unit, pr_name, pr_out);
        if (rb->parsed()) return run_rebalance(g, rb_dataset, rb_target, rb_seed, rb_out);
        if (cf->parsed()) return run_confusion(g, cf_records, cf_labels, cf_out);
        if (sim->parsed()) return run_similarity(g, sim_dir, sim_kind, sim_out);
        if (lf->parsed())
            return run_lingfeat(g, lf_problems, lf_parses, lf_base, lf_adapter, lf_key, lf_lexicon,
                                lf_out);
        if (jd->parsed()) {
            jd_cfg.base_url = jd_endpoint;
            jd_cfg.model = jd_model;
            return run_judge(g, jd_records, jd_cfg, jd_cache, jd_out);
        }
        if (rp->parsed()) return run_report(g, rp_inputs);
    } catch (const Error& e) {
        std::cerr << json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}.dump()
                  << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", "internal_error"}, {"message", e.what()}}}}.dump()
                  << '\n';
        return 1;
    }
    return 2;
}
