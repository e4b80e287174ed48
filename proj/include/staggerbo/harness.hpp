#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "staggerbo/acquisitions.hpp"
#include "staggerbo/gp.hpp"
#include "staggerbo/mtv.hpp"
#include "staggerbo/samplers.hpp"
#include "staggerbo/types.hpp"

namespace stagger {

struct ExperimentConfig {
    std::vector<std::string> functions;
    std::vector<std::string> methods;
    int num_dim = 10;
    int num_rounds = 0;  // 0: defaults to max(30, num_dim)
    int num_arms = 1;
    int repeats = 30;
    std::uint64_t seed = 0;
    int jobs = 0;  // worker threads; 0 = hardware concurrency

    int rounds() const { return num_rounds > 0 ? num_rounds : std::max(30, num_dim); }
};

/// Parse the flat key=value config format ('#' starts a comment).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunTrace {
    std::string method;
    std::string function;
    int repeat = 0;
    std::vector<double> best_so_far;  // running max of measured y, per round
    std::vector<double> wall_time_s;  // arm generation only, per round
    bool failed = false;
    std::string error;
};

/// One trace per (method, function, repeat); failures are recorded on the
/// trace, not thrown. Deterministic given the config (wall times aside).
std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg);

struct ScoreTable {
    std::vector<std::string> methods;
    Vec scores;       // s_m in [0,1]
    Vec std_errors;   // over (function, repeat) cells
    Mat round_means;  // rounds x methods, mean scaled rank per round
};

/// Rank-based scores: per cell and round, methods are ranked by
/// best-so-far (ties get the mean rank), scaled to [0,1], averaged over
/// rounds, then over cells. Needs >= 2 methods and complete cells.
ScoreTable rank_scores(const std::vector<RunTrace>& traces);

/// A resolved method name. Recognized: random, sobol, sts, sts-ui,
/// sts-m, sts-t, sts-ns, sts-M<n> (iteration override), ts, ts-<n>
/// (candidate count), pss, ei, ucb, sr, mtv, mtv+sts.
struct ParsedMethod {
    enum class Family { Random, Sobol, Sts, Ts, Pss, Acq, Mtv };
    Family family = Family::Random;
    std::string name;
    StsConfig sts{};
    TsConfig ts{};
    PssConfig pss{};
    AcqSpec acq{};
    MtvConfig mtv{};
    PStarSource mtv_source = PStarSource::Sts;
};

/// Throws ConfigError for unknown names.
ParsedMethod parse_method(const std::string& name);

/// Method name -> per-round sampler used by the diagnostics drivers.
using ArmSampler = std::function<Point(const GpModel&, int d, RngStream&)>;

struct DiagnosticsRecord {
    double rmse = 0.0;       // mean squared distance to the true optimum
    double bias = 0.0;       // mean signed per-coordinate deviation
    double scale = 0.0;      // geometric mean of per-dimension std
    double std_p_max = 0.0;  // spread of estimated max-probabilities
    double duration = 0.0;   // seconds spent drawing the samples
    PointSet samples;        // the 64 diagnostic points
};

/// Draw 64 samples with the sampler under test and summarize how they
/// relate to the true optimum and to p* (1024 joint draws estimate each
/// sample's probability of being the maximizer).
DiagnosticsRecord diagnostics(const GpModel& model, const ArmSampler& sampler,
                              const Point& true_opt, RngStream& rng);

struct DiagnoseRow {
    std::string sampler;
    int seed = 0;
    int round = 0;
    double arm_seconds = 0.0;
    double best_so_far = 0.0;
    bool has_diag = false;
    DiagnosticsRecord diag;
};

struct DiagnoseOptions {
    std::vector<std::string> samplers{"sts", "pss", "ts-1000", "ts-10000", "sobol"};
    std::vector<std::string> diag_samplers;  // empty: all of `samplers`
    int num_dim = 5;
    int rounds = 30;
    int seeds = 5;
    std::uint64_t seed = 0;
    int jobs = 0;
};

/// Sphere-target sampler comparison: per round, draw one arm with the
/// sampler, measure, refit, then compute diagnostics on the refit model.
std::vector<DiagnoseRow> run_diagnose(const DiagnoseOptions& opts);

struct SweepResult {
    int iterations;  // the M value
    ScoreTable table;
};

/// Re-run the experiment once per M with the sts refinement count
/// overridden; other methods in the config serve as fixed baselines.
std::vector<SweepResult> sweep_iterations(const ExperimentConfig& base,
                                          const std::vector<int>& m_values);

// ---- serialization ----

std::string traces_to_csv(const std::vector<RunTrace>& traces);
std::vector<RunTrace> traces_from_csv(const std::string& text);
std::string scores_to_csv(const ScoreTable& table);
std::string diagnose_to_csv(const std::vector<DiagnoseRow>& rows);

/// Figure-style chart: mean best_so_far per method with +-2 SE bands.
std::string traces_to_svg(const std::vector<RunTrace>& traces);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace stagger
