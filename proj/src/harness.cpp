#include "staggerbo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "staggerbo/domain.hpp"
#include "staggerbo/parallel.hpp"
#include "staggerbo/testbed.hpp"

namespace stagger {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool parse_int_suffix(const std::string& name, const std::string& prefix, int& out) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
    const std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return false;
    out = std::stoi(digits);
    return true;
}

}  // namespace

ParsedMethod parse_method(const std::string& name) {
    ParsedMethod pm;
    pm.name = name;
    using Family = ParsedMethod::Family;
    int n = 0;
    if (name == "random") {
        pm.family = Family::Random;
    } else if (name == "sobol") {
        pm.family = Family::Sobol;
    } else if (name == "sts") {
        pm.family = Family::Sts;
    } else if (name == "sts-ui") {
        pm.family = Family::Sts;
        pm.sts.init_mode = StsInit::Uniform;
    } else if (name == "sts-m") {
        pm.family = Family::Sts;
        pm.sts.init_mode = StsInit::BestMeasured;
    } else if (name == "sts-t") {
        pm.family = Family::Sts;
        pm.sts.init_mode = StsInit::ThompsonAtMeasured;
    } else if (name == "sts-ns") {
        pm.family = Family::Sts;
        pm.sts.proposal_mode = StsProposal::Uniform;
    } else if (parse_int_suffix(name, "sts-M", n)) {
        pm.family = Family::Sts;
        pm.sts.iterations = n;
    } else if (name == "ts") {
        pm.family = Family::Ts;
    } else if (parse_int_suffix(name, "ts-", n)) {
        if (n < 1) throw ConfigError("method '" + name + "': candidate count must be >= 1");
        pm.family = Family::Ts;
        pm.ts.num_candidates = n;
    } else if (name == "pss") {
        pm.family = Family::Pss;
    } else if (name == "ei") {
        pm.family = Family::Acq;
        pm.acq.kind = AcqKind::Ei;
    } else if (name == "ucb") {
        pm.family = Family::Acq;
        pm.acq.kind = AcqKind::Ucb;
    } else if (name == "sr") {
        pm.family = Family::Acq;
        pm.acq.kind = AcqKind::Sr;
    } else if (name == "mtv") {
        pm.family = Family::Mtv;
        pm.mtv_source = PStarSource::Pss;
    } else if (name == "mtv+sts") {
        pm.family = Family::Mtv;
        pm.mtv_source = PStarSource::Sts;
    } else {
        throw ConfigError("unknown method '" + name + "'");
    }
    return pm;
}

namespace {

// Arms for one round. `rng` advances; `sobol_key` stays fixed per trace so
// sobol-family arms continue one scrambled sequence across rounds.
PointSet generate_arms(const ParsedMethod& pm, const GpModel& model, int d, int round,
                       int num_arms, RngStream& rng, const RngStream& sobol_key) {
    using Family = ParsedMethod::Family;
    PointSet arms(num_arms, d);
    switch (pm.family) {
        case Family::Random:
            for (int j = 0; j < num_arms; ++j) arms.row(j) = uniform_point(rng, d).transpose();
            return arms;
        case Family::Sobol:
            return sobol_points(num_arms, d, sobol_key,
                                static_cast<std::int64_t>(round) * num_arms);
        case Family::Sts:
            for (int j = 0; j < num_arms; ++j)
                arms.row(j) = sts_sample(model, d, pm.sts, rng).transpose();
            return arms;
        case Family::Ts:
            for (int j = 0; j < num_arms; ++j)
                arms.row(j) = ts_sample(model, d, pm.ts, rng).transpose();
            return arms;
        case Family::Pss:
            for (int j = 0; j < num_arms; ++j)
                arms.row(j) = pss_sample(model, d, pm.pss, rng).transpose();
            return arms;
        case Family::Acq: {
            if (model.empty()) return sobol_points(num_arms, d, sobol_key, 0);
            // Sequential greedy with fantasized observations at the mean.
            GpModel work = model;
            for (int j = 0; j < num_arms; ++j) {
                const Point arm = propose_arm(pm.acq, work, d, round, rng);
                arms.row(j) = arm.transpose();
                if (j + 1 < num_arms) {
                    const double fantasy = mean_var_grad(work, arm, false).mean;
                    work = work.with_observations(arm.transpose(), Vec::Constant(1, fantasy));
                }
            }
            return arms;
        }
        case Family::Mtv: {
            MtvConfig cfg = pm.mtv;
            cfg.num_arms = num_arms;
            return design_batch(model, d, cfg, rng, pm.mtv_source).arms;
        }
    }
    throw std::logic_error("generate_arms: unknown family");
}

RunTrace run_trace(const ExperimentConfig& cfg, const ParsedMethod& pm,
                   const TestFunction& objective, int function_index, int method_index,
                   int repeat) {
    RunTrace trace;
    trace.method = pm.name;
    trace.function = objective.name;
    trace.repeat = repeat;

    const int d = cfg.num_dim;
    const int rounds = cfg.rounds();
    const std::uint64_t stream =
        hash_mix(hash_mix(static_cast<std::uint64_t>(function_index) * 1000003ull +
                              static_cast<std::uint64_t>(repeat),
                          0x545241434Bull),
                 static_cast<std::uint64_t>(method_index));
    RngStream rng(cfg.seed, stream);
    const RngStream sobol_key = rng.fork(0x50424F4Cull);

    const bool uses_model =
        pm.family != ParsedMethod::Family::Random && pm.family != ParsedMethod::Family::Sobol;

    Dataset data(d);
    GpModel model = fit(data);
    double best = -std::numeric_limits<double>::infinity();
    for (int round = 0; round < rounds; ++round) {
        const auto t0 = clock_type::now();
        const PointSet arms = generate_arms(pm, model, d, round, cfg.num_arms, rng, sobol_key);
        const double wall = seconds_since(t0);

        Vec ys(arms.rows());
        for (Eigen::Index j = 0; j < arms.rows(); ++j)
            ys[j] = evaluate_unit(objective, arms.row(j).transpose());
        data.append(arms, ys);
        if (uses_model) model = fit(data);

        best = std::max(best, ys.maxCoeff());
        trace.best_so_far.push_back(best);
        trace.wall_time_s.push_back(wall);
    }
    return trace;
}

}  // namespace

std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.functions.empty()) throw ConfigError("run_experiment: no functions");
    if (cfg.methods.empty()) throw ConfigError("run_experiment: no methods");
    if (cfg.num_dim < 1) throw ConfigError("run_experiment: num_dim must be >= 1");
    if (cfg.num_arms < 1) throw ConfigError("run_experiment: num_arms must be >= 1");
    if (cfg.repeats < 1) throw ConfigError("run_experiment: repeats must be >= 1");
    if (cfg.rounds() < 1) throw ConfigError("run_experiment: num_rounds must be >= 1");

    std::vector<ParsedMethod> methods;
    methods.reserve(cfg.methods.size());
    for (const auto& name : cfg.methods) methods.push_back(parse_method(name));
    std::vector<TestFunction> bases;
    bases.reserve(cfg.functions.size());
    for (const auto& name : cfg.functions) bases.push_back(make_function(name, cfg.num_dim));

    const int nf = static_cast<int>(cfg.functions.size());
    const int nm = static_cast<int>(cfg.methods.size());
    const int total = nm * nf * cfg.repeats;
    std::vector<RunTrace> traces(static_cast<std::size_t>(total));

    parallel_for(
        total,
        [&](int idx) {
            const int m = idx / (nf * cfg.repeats);
            const int f = (idx / cfg.repeats) % nf;
            const int r = idx % cfg.repeats;
            // All methods see the same distorted instance for a given
            // (function, repeat).
            const std::uint64_t dseed =
                hash_mix(cfg.seed, hash_mix(static_cast<std::uint64_t>(f) * 7919ull +
                                                static_cast<std::uint64_t>(r),
                                            0x44495354ull));
            const TestFunction objective = distort(bases[static_cast<std::size_t>(f)], dseed);
            auto& slot = traces[static_cast<std::size_t>(idx)];
            try {
                slot = run_trace(cfg, methods[static_cast<std::size_t>(m)], objective, f, m, r);
            } catch (const std::exception& err) {
                slot.method = cfg.methods[static_cast<std::size_t>(m)];
                slot.function = cfg.functions[static_cast<std::size_t>(f)];
                slot.repeat = r;
                slot.failed = true;
                slot.error = err.what();
            }
        },
        cfg.jobs);
    return traces;
}

ScoreTable rank_scores(const std::vector<RunTrace>& traces) {
    std::vector<std::string> methods;
    for (const auto& t : traces) {
        if (t.failed) throw ConfigError("rank_scores: failed trace for method '" + t.method + "'");
        if (std::find(methods.begin(), methods.end(), t.method) == methods.end())
            methods.push_back(t.method);
    }
    const int nm = static_cast<int>(methods.size());
    if (nm < 2) throw ConfigError("rank_scores: need at least 2 methods");
    if (traces.empty()) throw ConfigError("rank_scores: no traces");
    const std::size_t rounds = traces.front().best_so_far.size();
    if (rounds == 0) throw ConfigError("rank_scores: empty traces");

    const auto method_index = [&](const std::string& name) {
        return static_cast<int>(std::find(methods.begin(), methods.end(), name) - methods.begin());
    };

    std::map<std::pair<std::string, int>, std::vector<const RunTrace*>> cells;
    for (const auto& t : traces) {
        if (t.best_so_far.size() != rounds) throw ConfigError("rank_scores: mismatched round counts");
        auto& cell = cells[{t.function, t.repeat}];
        cell.resize(static_cast<std::size_t>(nm), nullptr);
        auto& slot = cell[static_cast<std::size_t>(method_index(t.method))];
        if (slot != nullptr) throw ConfigError("rank_scores: duplicate trace for method '" + t.method + "'");
        slot = &t;
    }

    ScoreTable out;
    out.methods = methods;
    out.scores = Vec::Zero(nm);
    out.std_errors = Vec::Zero(nm);
    out.round_means = Mat::Zero(static_cast<Eigen::Index>(rounds), nm);

    Mat cell_scores(static_cast<Eigen::Index>(cells.size()), nm);
    Eigen::Index cell_idx = 0;
    std::vector<int> order(static_cast<std::size_t>(nm));
    for (const auto& [key, cell] : cells) {
        for (int m = 0; m < nm; ++m) {
            if (cell[static_cast<std::size_t>(m)] == nullptr)
                throw ConfigError("rank_scores: incomplete cell (function '" + key.first +
                                  "', repeat " + std::to_string(key.second) + ")");
        }
        Vec cscore = Vec::Zero(nm);
        for (std::size_t i = 0; i < rounds; ++i) {
            std::iota(order.begin(), order.end(), 0);
            const auto y_of = [&](int m) {
                return cell[static_cast<std::size_t>(m)]->best_so_far[i];
            };
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return y_of(a) < y_of(b); });
            // Mean rank for ties, scaled by (M-1) to land in [0, 1].
            int pos = 0;
            while (pos < nm) {
                int end = pos;
                while (end + 1 < nm && y_of(order[static_cast<std::size_t>(end + 1)]) ==
                                           y_of(order[static_cast<std::size_t>(pos)]))
                    ++end;
                const double mean_rank = 0.5 * (pos + end);
                for (int j = pos; j <= end; ++j) {
                    const int m = order[static_cast<std::size_t>(j)];
                    const double r = mean_rank / (nm - 1);
                    cscore[m] += r;
                    out.round_means(static_cast<Eigen::Index>(i), m) += r;
                }
                pos = end + 1;
            }
        }
        cscore /= static_cast<double>(rounds);
        cell_scores.row(cell_idx++) = cscore.transpose();
    }

    const double ncells = static_cast<double>(cells.size());
    out.round_means /= ncells;
    out.scores = cell_scores.colwise().mean();
    if (cells.size() > 1) {
        for (int m = 0; m < nm; ++m) {
            const double var =
                (cell_scores.col(m).array() - out.scores[m]).square().sum() / (ncells - 1.0);
            out.std_errors[m] = std::sqrt(var / ncells);
        }
    }
    return out;
}

DiagnosticsRecord diagnostics(const GpModel& model, const ArmSampler& sampler,
                              const Point& true_opt, RngStream& rng) {
    constexpr int kSamples = 64;
    constexpr int kMaxDraws = 1024;
    const int d = static_cast<int>(true_opt.size());

    DiagnosticsRecord rec;
    rec.samples.resize(kSamples, d);
    const auto t0 = clock_type::now();
    for (int i = 0; i < kSamples; ++i) rec.samples.row(i) = sampler(model, d, rng).transpose();
    rec.duration = seconds_since(t0);

    double sq = 0.0, signed_dev = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const Vec delta = rec.samples.row(i).transpose() - true_opt;
        sq += delta.squaredNorm();
        signed_dev += delta.sum();
    }
    rec.rmse = sq / kSamples;
    rec.bias = signed_dev / (kSamples * d);

    double log_scale = 0.0;
    bool degenerate = false;
    for (int k = 0; k < d && !degenerate; ++k) {
        const double mean = rec.samples.col(k).mean();
        const double sd =
            std::sqrt((rec.samples.col(k).array() - mean).square().sum() / kSamples);
        if (sd == 0.0)
            degenerate = true;  // geometric mean with a zero factor
        else
            log_scale += std::log(sd);
    }
    rec.scale = degenerate ? 0.0 : std::exp(log_scale / d);

    const MvnSampler mvn(posterior(model, rec.samples));
    Eigen::VectorXi wins = Eigen::VectorXi::Zero(kSamples);
    for (int t = 0; t < kMaxDraws; ++t) {
        const Vec draw = mvn.draw(rng);
        Eigen::Index which = 0;
        draw.maxCoeff(&which);
        wins[which] += 1;
    }
    const Vec pmax = wins.cast<double>() / kMaxDraws;
    const double pmean = pmax.mean();
    rec.std_p_max = std::sqrt((pmax.array() - pmean).square().sum() / kSamples);
    return rec;
}

namespace {

ArmSampler make_arm_sampler(const std::string& name) {
    const ParsedMethod pm = parse_method(name);
    using Family = ParsedMethod::Family;
    switch (pm.family) {
        case Family::Random:
            return [](const GpModel&, int d, RngStream& rng) { return uniform_point(rng, d); };
        case Family::Sts:
            return [pm](const GpModel& model, int d, RngStream& rng) {
                return sts_sample(model, d, pm.sts, rng);
            };
        case Family::Ts:
            return [pm](const GpModel& model, int d, RngStream& rng) {
                return ts_sample(model, d, pm.ts, rng);
            };
        case Family::Pss:
            return [pm](const GpModel& model, int d, RngStream& rng) {
                return pss_sample(model, d, pm.pss, rng);
            };
        default:
            throw ConfigError("no standalone sampler for method '" + name + "'");
    }
}

}  // namespace

std::vector<DiagnoseRow> run_diagnose(const DiagnoseOptions& opts) {
    if (opts.samplers.empty()) throw ConfigError("run_diagnose: no samplers");
    if (opts.rounds < 1 || opts.seeds < 1 || opts.num_dim < 1)
        throw ConfigError("run_diagnose: invalid options");
    const auto& diag_list = opts.diag_samplers.empty() ? opts.samplers : opts.diag_samplers;
    const auto wants_diag = [&](const std::string& s) {
        return std::find(diag_list.begin(), diag_list.end(), s) != diag_list.end();
    };

    const TestFunction target = make_function("sphere", opts.num_dim);
    const Point true_opt = target.optimum->first;

    const int ns = static_cast<int>(opts.samplers.size());
    const int total = ns * opts.seeds;
    std::vector<std::vector<DiagnoseRow>> results(static_cast<std::size_t>(total));

    parallel_for(
        total,
        [&](int idx) {
            const int si = idx / opts.seeds;
            const int seed_idx = idx % opts.seeds;
            const std::string& name = opts.samplers[static_cast<std::size_t>(si)];
            const bool sobol_family = name == "sobol";
            ArmSampler sampler;
            if (!sobol_family) sampler = make_arm_sampler(name);

            RngStream rng(opts.seed,
                          hash_mix(static_cast<std::uint64_t>(idx), 0x444941474eull));
            const RngStream sobol_key = rng.fork(0x50424F4Cull);

            Dataset data(opts.num_dim);
            GpModel model = fit(data);
            double best = -std::numeric_limits<double>::infinity();
            auto& rows = results[static_cast<std::size_t>(idx)];
            for (int round = 0; round < opts.rounds; ++round) {
                const auto t0 = clock_type::now();
                Point arm;
                if (sobol_family) {
                    arm = sobol_points(1, opts.num_dim, sobol_key, round).row(0).transpose();
                } else {
                    arm = sampler(model, opts.num_dim, rng);
                }
                const double arm_seconds = seconds_since(t0);
                const double y = evaluate_unit(target, arm);
                data.append(arm.transpose(), Vec::Constant(1, y));
                model = fit(data);
                best = std::max(best, y);

                DiagnoseRow row;
                row.sampler = name;
                row.seed = seed_idx;
                row.round = round;
                row.arm_seconds = arm_seconds;
                row.best_so_far = best;
                if (wants_diag(name)) {
                    RngStream diag_rng = rng.fork(0xD1A6ull + static_cast<std::uint64_t>(round));
                    if (sobol_family) {
                        // Space-filling baseline: 64 fresh scrambled points.
                        const PointSet pts = sobol_points(64, opts.num_dim, diag_rng, 0);
                        int next = 0;
                        const ArmSampler seq = [&pts, &next](const GpModel&, int, RngStream&) {
                            return Point(pts.row(next++).transpose());
                        };
                        row.diag = diagnostics(model, seq, true_opt, diag_rng);
                    } else {
                        row.diag = diagnostics(model, sampler, true_opt, diag_rng);
                    }
                    row.has_diag = true;
                }
                rows.push_back(std::move(row));
            }
        },
        opts.jobs);

    std::vector<DiagnoseRow> flat;
    for (auto& rows : results)
        for (auto& r : rows) flat.push_back(std::move(r));
    return flat;
}

std::vector<SweepResult> sweep_iterations(const ExperimentConfig& base,
                                          const std::vector<int>& m_values) {
    if (m_values.empty()) throw ConfigError("sweep_iterations: no M values");
    for (int m : m_values)
        if (m < 0) throw ConfigError("sweep_iterations: M must be >= 0");
    std::vector<SweepResult> out;
    for (int m : m_values) {
        ExperimentConfig cfg = base;
        bool has_sts = false;
        for (auto& name : cfg.methods) {
            if (name == "sts" || name.rfind("sts-M", 0) == 0) {
                name = "sts-M" + std::to_string(m);
                has_sts = true;
            }
        }
        if (!has_sts) throw ConfigError("sweep_iterations: config must include an sts method");
        auto traces = run_experiment(cfg);
        // Report under the plain name; the M value is carried alongside.
        for (auto& t : traces)
            if (t.method.rfind("sts-M", 0) == 0) t.method = "sts";
        out.push_back({m, rank_scores(traces)});
    }
    return out;
}

}  // namespace stagger
