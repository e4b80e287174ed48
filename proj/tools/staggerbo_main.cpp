// Command-line front end: run experiments, score traces, replicate the
// sampler diagnostics, and drive the ablation / iteration-sweep studies.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure in any
// trace.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "staggerbo/harness.hpp"

namespace {

using namespace stagger;

int finish_run(std::vector<RunTrace> traces, const std::string& out_path,
               const std::string& scores_path, const std::string& svg_path) {
    int failures = 0;
    for (const auto& t : traces) {
        if (t.failed) {
            std::fprintf(stderr, "trace failed: method=%s function=%s repeat=%d: %s\n",
                         t.method.c_str(), t.function.c_str(), t.repeat, t.error.c_str());
            ++failures;
        }
    }
    if (!out_path.empty()) write_text_file(out_path, traces_to_csv(traces));
    std::vector<RunTrace> ok;
    for (auto& t : traces)
        if (!t.failed) ok.push_back(std::move(t));
    if (!scores_path.empty()) {
        const ScoreTable table = rank_scores(ok);
        write_text_file(scores_path, scores_to_csv(table));
    }
    if (!svg_path.empty()) write_text_file(svg_path, traces_to_svg(ok));
    return failures > 0 ? 2 : 0;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

std::vector<std::string> parse_str_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian-optimization toolkit: stagger Thompson sampling, batch design, and a "
                 "benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, out_path, scores_path, svg_path, traces_path;
    int jobs = 0;

    auto* run = app.add_subcommand("run", "Run an experiment from a key=value config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_path, "trace CSV output");
    run->add_option("--scores", scores_path, "score CSV output");
    run->add_option("--svg", svg_path, "best-so-far chart (SVG)");
    run->add_option("--jobs", jobs, "worker threads (0 = auto)");

    auto* score = app.add_subcommand("score", "Rank-score previously written trace CSVs");
    score->add_option("--traces", traces_path, "trace CSV input")->required();
    score->add_option("--out", scores_path, "score CSV output");
    score->add_option("--svg", svg_path, "best-so-far chart (SVG)");

    DiagnoseOptions diag;
    std::string diag_samplers_csv, samplers_csv;
    auto* diagnose = app.add_subcommand(
        "diagnose", "Sampler comparison on the sphere target (rmse/bias/scale/p_max/duration)");
    diagnose->add_option("--out", out_path, "diagnostics CSV output");
    diagnose->add_option("--samplers", samplers_csv, "comma list (default sts,pss,ts-1000,ts-10000,sobol)");
    diagnose->add_option("--diag-samplers", diag_samplers_csv,
                         "samplers that also get per-round 64-sample diagnostics (default: all)");
    diagnose->add_option("--num-dim", diag.num_dim, "dimension (default 5)");
    diagnose->add_option("--rounds", diag.rounds, "rounds (default 30)");
    diagnose->add_option("--seeds", diag.seeds, "independent repeats (default 5)");
    diagnose->add_option("--seed", diag.seed, "base seed");
    diagnose->add_option("--jobs", jobs, "worker threads (0 = auto)");

    auto* ablate = app.add_subcommand("ablate", "Compare sts against its ablation variants");
    ablate->add_option("--config", config_path, "config file (methods entry is replaced)")
        ->required();
    ablate->add_option("--out", out_path, "trace CSV output");
    ablate->add_option("--scores", scores_path, "score CSV output");
    ablate->add_option("--svg", svg_path, "best-so-far chart (SVG)");
    ablate->add_option("--jobs", jobs, "worker threads (0 = auto)");

    std::string m_values_csv = "0,3,10,30,100";
    auto* sweep = app.add_subcommand("sweep-m", "Score sts across refinement-iteration counts");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--m", m_values_csv, "comma list of M values (default 0,3,10,30,100)");
    sweep->add_option("--out", out_path, "score CSV output (columns M,method,score,se)");
    sweep->add_option("--jobs", jobs, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = load_config(config_path);
            if (jobs > 0) cfg.jobs = jobs;
            return finish_run(run_experiment(cfg), out_path, scores_path, svg_path);
        }
        if (score->parsed()) {
            const auto traces = traces_from_csv(read_text_file(traces_path));
            const ScoreTable table = rank_scores(traces);
            const std::string csv = scores_to_csv(table);
            if (scores_path.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                write_text_file(scores_path, csv);
            }
            if (!svg_path.empty()) write_text_file(svg_path, traces_to_svg(traces));
            return 0;
        }
        if (diagnose->parsed()) {
            if (!samplers_csv.empty()) diag.samplers = parse_str_list(samplers_csv);
            if (!diag_samplers_csv.empty()) diag.diag_samplers = parse_str_list(diag_samplers_csv);
            diag.jobs = jobs;
            const auto rows = run_diagnose(diag);
            const std::string csv = diagnose_to_csv(rows);
            if (out_path.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                write_text_file(out_path, csv);
            }
            return 0;
        }
        if (ablate->parsed()) {
            ExperimentConfig cfg = load_config(config_path);
            if (jobs > 0) cfg.jobs = jobs;
            cfg.methods = {"sts", "sts-ui", "sts-m", "sts-t", "sts-ns", "pss", "ts", "random"};
            return finish_run(run_experiment(cfg), out_path, scores_path, svg_path);
        }
        if (sweep->parsed()) {
            ExperimentConfig cfg = load_config(config_path);
            if (jobs > 0) cfg.jobs = jobs;
            if (cfg.methods.empty()) cfg.methods = {"sts", "ts", "random"};
            const auto results = sweep_iterations(cfg, parse_int_list(m_values_csv));
            std::string csv = "M,method,score,se\n";
            for (const auto& r : results) {
                for (std::size_t m = 0; m < r.table.methods.size(); ++m) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g\n", r.iterations,
                                  r.table.methods[m].c_str(),
                                  r.table.scores[static_cast<Eigen::Index>(m)],
                                  r.table.std_errors[static_cast<Eigen::Index>(m)]);
                    csv += buf;
                }
            }
            if (out_path.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                write_text_file(out_path, csv);
            }
            return 0;
        }
    } catch (const stagger::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
