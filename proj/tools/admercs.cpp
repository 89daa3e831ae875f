#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "admercs/bench.hpp"
#include "admercs/dataset.hpp"
#include "admercs/eval.hpp"
#include "admercs/explain.hpp"
#include "admercs/model.hpp"
#include "admercs/presets.hpp"

namespace fs = std::filesystem;
using namespace admercs;

namespace {

bool csv_has_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    std::string header;
    if (!std::getline(in, header)) return false;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::stringstream ss(header);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (field == column) return true;
    }
    return false;
}

Dataset load_data(const std::string& path, const std::string& label_column,
                  const std::string& schema_path, bool normalize) {
    CsvOptions opts;
    if (!label_column.empty() && csv_has_column(path, label_column))
        opts.label_column = label_column;
    if (!schema_path.empty()) opts.schema_override = read_schema_file(schema_path);
    Dataset d = load_csv(path, opts);
    return normalize ? normalize_minmax(d) : d;
}

struct FitFlags {
    std::string preset;
    TreeParams tree;
    ScoringParams scoring;
    uint64_t seed = 0;
    bool freeze_lambda = false;

    // Flags explicitly set on the command line win over the preset.
    FitParams resolve(const CLI::App& cmd, int32_t threads) const {
        FitParams p;
        if (!preset.empty()) {
            auto found = find_preset(preset);
            if (!found) {
                std::string names;
                for (const Preset& pr : presets()) names += " " + pr.name;
                throw CLI::ValidationError("--preset", "unknown preset '" + preset +
                                                           "'; available:" + names);
            }
            p.tree = found->tree;
            p.scoring = found->scoring;
        } else {
            p.tree = tree;
            p.scoring = scoring;
        }
        if (cmd.count("--max-depth")) p.tree.max_depth = tree.max_depth;
        if (cmd.count("--min-samples-leaf"))
            p.tree.min_samples_leaf_frac = tree.min_samples_leaf_frac;
        if (cmd.count("--min-impurity-decrease"))
            p.tree.min_impurity_decrease = tree.min_impurity_decrease;
        if (cmd.count("--rho")) p.scoring.rho = scoring.rho;
        if (cmd.count("--gamma-delta")) p.scoring.gamma_delta = scoring.gamma_delta;
        if (cmd.count("--gamma-lambda")) p.scoring.gamma_lambda = scoring.gamma_lambda;
        if (cmd.count("--iterations")) p.scoring.iterations = scoring.iterations;
        p.scoring.freeze_lambda = freeze_lambda;
        p.seed = seed;
        p.threads = threads;
        return p;
    }
};

void add_fit_flags(CLI::App& cmd, FitFlags& f) {
    cmd.add_option("--preset", f.preset,
                   "named parameter preset (campos, campos-hd, hics, synth-c, synth-cs, synth-i)");
    cmd.add_option("--max-depth", f.tree.max_depth, "maximum tree depth");
    cmd.add_option("--min-samples-leaf", f.tree.min_samples_leaf_frac,
                   "minimum leaf size as a fraction of N");
    cmd.add_option("--min-impurity-decrease", f.tree.min_impurity_decrease,
                   "minimum impurity decrease for a split");
    cmd.add_option("--rho", f.scoring.rho, "likelihood normalization fraction");
    cmd.add_option("--gamma-delta", f.scoring.gamma_delta, "instance-score trust");
    cmd.add_option("--gamma-lambda", f.scoring.gamma_lambda, "context-score trust");
    cmd.add_option("--iterations", f.scoring.iterations, "score iteration count");
    cmd.add_flag("--freeze-lambda", f.freeze_lambda,
                 "keep all context scores at zero (density-only scoring)");
    cmd.add_option("--seed", f.seed, "random seed");
}

void write_fit_report(const std::string& path, const FitResult& fit_result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "# training instance scores\nindex\tdelta\n";
    out.precision(17);
    for (size_t i = 0; i < fit_result.state.delta.size(); ++i)
        out << i << '\t' << fit_result.state.delta[i] << '\n';
    out << "# contexts\ncontext\ttree\tleaf\tlambda\tlambda_final\tsize\n";
    const Model& m = fit_result.model;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        for (int32_t leaf = 0; leaf < m.trees[t].n_leaves(); ++leaf) {
            const int32_t ctx = m.context_id(static_cast<int32_t>(t), leaf);
            out << ctx << '\t' << t << '\t' << leaf << '\t' << m.context_lambda[ctx]
                << '\t' << m.context_lambda_final[ctx] << '\t'
                << m.trees[t].nodes[m.trees[t].leaf_nodes[leaf]].members.size() << '\n';
        }
    }
}

void write_scores(const std::string& path, std::span<const double> scores) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scores: " + path);
    out << "index\tdelta\n";
    out.precision(17);
    for (size_t i = 0; i < scores.size(); ++i) out << i << '\t' << scores[i] << '\n';
}

std::vector<double> read_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores: " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string first, second;
        std::getline(ss, first, '\t');
        if (!std::getline(ss, second, '\t')) second = first;  // single-column file
        try {
            out.push_back(std::stod(second));
        } catch (...) {
            continue;  // header line
        }
    }
    if (out.empty()) throw std::runtime_error("no scores found in " + path);
    return out;
}

std::vector<uint8_t> read_labels(const std::string& path, const std::string& label_column) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv" &&
        csv_has_column(path, label_column)) {
        CsvOptions opts;
        opts.label_column = label_column;
        return *load_csv(path, opts).labels;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels: " + path);
    std::vector<uint8_t> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line == "1" || line == "anomaly" ? 1 : 0);
    }
    if (out.empty()) throw std::runtime_error("no labels found in " + path);
    return out;
}

ExperimentReport run_experiment(const std::vector<std::string>& csvs, const FitParams& params,
                                bool normalize) {
    ExperimentReport report;
    report.params_hash = hash_params(params_text(params));
    double auc_sum = 0.0, ap_sum = 0.0;
    int64_t ok = 0;
    for (const std::string& path : csvs) {
        ExperimentRow row;
        row.dataset = fs::path(path).filename().string();
        const auto start = std::chrono::steady_clock::now();
        try {
            Dataset d = load_data(path, "label", "", normalize);
            if (!d.labels) throw std::runtime_error("dataset has no label column");
            FitResult fit_result = fit(d, params);
            const EvalResult r = evaluate(fit_result.state.delta, *d.labels);
            row.auc = r.auc;
            row.ap = r.ap;
            auc_sum += r.auc;
            ap_sum += r.ap;
            ++ok;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        report.rows.push_back(std::move(row));
    }
    if (ok > 0) {
        report.mean_auc = auc_sum / static_cast<double>(ok);
        report.mean_ap = ap_sum / static_cast<double>(ok);
    }
    return report;
}

std::vector<std::string> list_suite(const std::string& dir) {
    std::vector<std::string> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") csvs.push_back(entry.path().string());
    }
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) throw std::runtime_error("no .csv files in " + dir);
    return csvs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-directional tree-ensemble anomaly detector"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value configuration file");

    int32_t threads = static_cast<int32_t>(
        std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--threads", threads, "worker thread cap")
        ->envname("ADMERCS_THREADS");

    std::string data_path, model_path, out_path, report_path, schema_path;
    std::string label_column = "label";
    bool normalize = false;

    // fit
    auto* cmd_fit = app.add_subcommand("fit", "fit a model on a CSV dataset");
    FitFlags fit_flags;
    cmd_fit->add_option("--data", data_path, "training CSV")->required();
    cmd_fit->add_option("--out", model_path, "output model file")->required();
    cmd_fit->add_option("--report", report_path, "training score report (TSV)");
    cmd_fit->add_option("--label-column", label_column,
                        "label column to exclude from features (if present)");
    cmd_fit->add_option("--schema", schema_path, "schema override file");
    cmd_fit->add_flag("--normalize", normalize, "min-max normalize numeric attributes");
    add_fit_flags(*cmd_fit, fit_flags);

    // score
    auto* cmd_score = app.add_subcommand("score", "score instances with a fitted model");
    cmd_score->add_option("--model", model_path, "model file")->required();
    cmd_score->add_option("--data", data_path, "CSV to score")->required();
    cmd_score->add_option("--out", out_path, "output scores (TSV)")->required();
    cmd_score->add_option("--label-column", label_column, "label column to ignore");
    cmd_score->add_option("--schema", schema_path, "schema override file");
    cmd_score->add_flag("--normalize", normalize, "min-max normalize numeric attributes");

    // explain
    auto* cmd_explain = app.add_subcommand("explain", "explain high-scoring instances");
    int64_t instance = -1;
    int32_t top_n = 5, per_instance = 5;
    double lambda_threshold = 0.5;
    cmd_explain->add_option("--model", model_path, "model file")->required();
    cmd_explain->add_option("--data", data_path, "CSV with the instances")->required();
    cmd_explain->add_option("--instance", instance, "explain this row only (0-based)");
    cmd_explain->add_option("--top", top_n, "explain the N highest-scoring rows");
    cmd_explain->add_option("--per-instance", per_instance, "max explanations per row");
    cmd_explain->add_option("--lambda-threshold", lambda_threshold,
                            "context score needed to call a context anomalous");
    cmd_explain->add_option("--out", out_path, "write text report here (default stdout)");
    cmd_explain->add_option("--label-column", label_column, "label column to ignore");
    cmd_explain->add_flag("--normalize", normalize, "min-max normalize numeric attributes");

    // gen-bench
    auto* cmd_gen = app.add_subcommand("gen-bench", "generate a synthetic benchmark suite");
    std::string family_name, out_dir;
    int32_t count = 30;
    uint64_t gen_seed = 1;
    cmd_gen->add_option("--family", family_name, "synth-c | synth-cs | synth-i")->required();
    cmd_gen->add_option("--out-dir", out_dir, "output directory")->required();
    cmd_gen->add_option("--count", count, "number of datasets");
    cmd_gen->add_option("--seed", gen_seed, "base seed");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "compute AUC / AP for scored data");
    std::string scores_path, labels_path, eval_report_path;
    cmd_eval->add_option("--scores", scores_path, "score file from `score`");
    cmd_eval->add_option("--labels", labels_path, "label file or labeled CSV");
    cmd_eval->add_option("--report", eval_report_path, "print the aggregate of a suite report");

    // experiment
    auto* cmd_exp = app.add_subcommand("experiment", "fit + evaluate a whole suite");
    FitFlags exp_flags;
    std::string suite_dir;
    cmd_exp->add_option("--suite", suite_dir, "directory of labeled CSVs")->required();
    cmd_exp->add_option("--out", out_path, "report path (TSV)")->required();
    cmd_exp->add_flag("--normalize", normalize, "min-max normalize numeric attributes");
    add_fit_flags(*cmd_exp, exp_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(cmd_fit)) {
            Dataset d = load_data(data_path, label_column, schema_path, normalize);
            FitResult result = fit(d, fit_flags.resolve(*cmd_fit, threads));
            save_model(result.model, model_path);
            if (!report_path.empty()) write_fit_report(report_path, result);
            std::cout << "model written to " << model_path << " (" << d.n_rows
                      << " rows, " << d.n_cols() << " attributes, "
                      << result.model.n_contexts() << " contexts, "
                      << result.state.iterations_run << " iterations)\n";
        } else if (app.got_subcommand(cmd_score)) {
            Model m = load_model(model_path);
            Dataset d = load_data(data_path, label_column, schema_path, normalize);
            write_scores(out_path, score_dataset(m, d, threads));
            std::cout << "scores written to " << out_path << '\n';
        } else if (app.got_subcommand(cmd_explain)) {
            Model m = load_model(model_path);
            Dataset d = load_data(data_path, label_column, "", normalize);
            DatasetAdapter adapter(m, d);

            std::vector<int64_t> rows;
            if (instance >= 0) {
                if (instance >= d.n_rows)
                    throw std::runtime_error("--instance out of range");
                rows.push_back(instance);
            } else {
                std::vector<double> scores = score_dataset(m, d, threads);
                std::vector<int64_t> order(d.n_rows);
                for (int64_t i = 0; i < d.n_rows; ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
                    return scores[a] > scores[b];
                });
                for (int64_t i = 0; i < std::min<int64_t>(top_n, d.n_rows); ++i)
                    rows.push_back(order[i]);
            }

            std::ostringstream text;
            for (int64_t r : rows) {
                const auto cells = adapter.translate(r);
                text << "instance " << r << " (score "
                     << score_instance(m, cells) << ")\n";
                const auto explanations =
                    explain_instance(m, cells, per_instance, lambda_threshold);
                if (explanations.empty()) text << "  nothing atypical\n";
                for (const Explanation& e : explanations)
                    text << "  - " << render_text(e) << '\n';
            }
            const auto contexts = list_anomalous_contexts(m, lambda_threshold);
            text << "anomalous contexts (lambda >= " << lambda_threshold
                 << "): " << contexts.size() << '\n';
            for (const ContextReport& c : contexts) {
                text << "  - tree " << c.tree << " (target " << c.target << "), lambda "
                     << c.lambda << ", " << c.members.size() << " members:";
                for (const Condition& cond : c.conditions)
                    text << ' ' << render_condition(cond) << ';';
                text << '\n';
            }
            if (out_path.empty()) {
                std::cout << text.str();
            } else {
                std::ofstream out(out_path, std::ios::binary);
                out << text.str();
                std::cout << "explanations written to " << out_path << '\n';
            }
        } else if (app.got_subcommand(cmd_gen)) {
            BenchFamily family;
            if (family_name == "synth-c") {
                family = BenchFamily::SynthC;
            } else if (family_name == "synth-cs") {
                family = BenchFamily::SynthCS;
            } else if (family_name == "synth-i") {
                family = BenchFamily::SynthI;
            } else {
                throw std::runtime_error("unknown family '" + family_name + "'");
            }
            const auto paths = gen_suite(family, count, gen_seed, out_dir, threads);
            std::cout << paths.size() << " datasets written to " << out_dir << '\n';
        } else if (app.got_subcommand(cmd_eval)) {
            if (!eval_report_path.empty()) {
                std::ifstream in(eval_report_path);
                if (!in) throw std::runtime_error("cannot open " + eval_report_path);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.rfind("AGGREGATE", 0) == 0) std::cout << line << '\n';
                }
            } else {
                if (scores_path.empty() || labels_path.empty())
                    throw std::runtime_error("need --scores and --labels (or --report)");
                const auto scores = read_scores(scores_path);
                const auto labels = read_labels(labels_path, label_column);
                if (scores.size() != labels.size())
                    throw std::runtime_error("scores/labels size mismatch");
                const EvalResult r = evaluate(scores, labels);
                std::cout << "auc\t" << r.auc << "\nap\t" << r.ap << '\n';
            }
        } else if (app.got_subcommand(cmd_exp)) {
            const FitParams params = exp_flags.resolve(*cmd_exp, threads);
            ExperimentReport report =
                run_experiment(list_suite(suite_dir), params, normalize);
            write_report(report, out_path);
            std::cout << "report written to " << out_path << " (mean auc "
                      << report.mean_auc << ", mean ap " << report.mean_ap << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
