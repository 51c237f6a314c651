// Command line front end: fit / fixed-point / sojourn / ode / simulate / compare.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "phlb/dist_spec.hpp"
#include "phlb/fixed_point.hpp"
#include "phlb/mean_field.hpp"
#include "phlb/moment_fit.hpp"
#include "phlb/simulation.hpp"

#ifndef PHLB_VERSION
#define PHLB_VERSION "0.0.0"
#endif

namespace {

using nlohmann::ordered_json;

struct OutputOpts {
    bool json = false;
    bool csv = false;
    bool no_timestamp = false;
};

void add_output_flags(CLI::App* cmd, OutputOpts& opts) {
    cmd->add_flag("--json", opts.json, "emit a JSON results document");
    cmd->add_flag("--csv", opts.csv, "emit the tabular results as CSV");
    cmd->add_flag("--no-timestamp", opts.no_timestamp,
                  "omit the timestamp so repeated runs are byte identical");
}

std::string now_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Full precision for machine readable output; %.17g round-trips doubles.
std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Human readable output sticks to six significant digits.
std::string human(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

ordered_json json_row(const phlb::RowVec& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ordered_json make_doc(const std::string& command, ordered_json params, ordered_json results,
                      const OutputOpts& opts, std::optional<std::uint64_t> seed = {}) {
    ordered_json prov;
    prov["version"] = PHLB_VERSION;
    if (seed) prov["seed"] = *seed;
    if (!opts.no_timestamp) prov["timestamp"] = now_utc();
    ordered_json doc;
    doc["command"] = command;
    doc["parameters"] = std::move(params);
    doc["results"] = std::move(results);
    doc["provenance"] = std::move(prov);
    return doc;
}

void emit_json(const ordered_json& doc) { std::fputs((doc.dump(2) + "\n").c_str(), stdout); }

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) line += ',';
        line += header[i];
    }
    line += '\n';
    std::fputs(line.c_str(), stdout);
    for (const auto& row : rows) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            line += full(row[i]);
        }
        line += '\n';
        std::fputs(line.c_str(), stdout);
    }
}

struct DistArgs {
    std::string spec;
    double lambda = 0.0;
    int d = 2;
};

void add_model_options(CLI::App* cmd, DistArgs& args) {
    cmd->add_option("--dist", args.spec,
                    "service distribution (exp:RATE, erlang:K,RATE, hyperexp:w1,..;r1,.., "
                    "coxian2:ETA,XI1,XI2, inline JSON, or FILE.json)")
        ->required();
    cmd->add_option("--lambda", args.lambda, "arrival rate per server")->required();
    cmd->add_option("--d", args.d, "number of probed servers")->check(CLI::PositiveNumber);
}

phlb::ModelParams build_params(const DistArgs& args) {
    return phlb::ModelParams(phlb::parse_dist(args.spec), args.lambda, args.d);
}

ordered_json dist_json(const phlb::PhaseType& ph) { return phlb::to_json(ph); }

// ---------------------------------------------------------------- fit ----

int run_fit(const std::vector<double>& m, const OutputOpts& opts) {
    phlb::Ph2Fit fit = phlb::fit_moments({m[0], m[1], m[2]});
    double err = phlb::verify_fit(fit);

    ordered_json params{{"m1", m[0]}, {"m2", m[1]}, {"m3", m[2]}};
    ordered_json flags = ordered_json::array();
    for (auto f : fit.flags) flags.push_back(phlb::to_string(f));
    ordered_json results;
    results["flags"] = flags;
    results["used_moments"] = {{"m1", fit.used.m1}, {"m2", fit.used.m2}, {"m3", fit.used.m3}};
    results["eta"] = fit.eta;
    results["xi1"] = fit.xi1;
    results["xi2"] = fit.xi2;
    results["dist"] = dist_json(fit.dist);
    results["max_rel_moment_error"] = err;
    ordered_json doc = make_doc("fit", params, results, opts);

    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        emit_csv({"m1", "m2", "m3", "used_m1", "used_m2", "used_m3", "eta", "xi1", "xi2",
                  "max_rel_moment_error"},
                 {{m[0], m[1], m[2], fit.used.m1, fit.used.m2, fit.used.m3, fit.eta, fit.xi1,
                   fit.xi2, err}});
    } else {
        std::printf("moment fit (m1=%s, m2=%s, m3=%s)\n", human(m[0]).c_str(),
                    human(m[1]).c_str(), human(m[2]).c_str());
        if (!fit.flags.empty()) {
            std::string joined;
            for (auto f : fit.flags) {
                if (!joined.empty()) joined += ", ";
                joined += phlb::to_string(f);
            }
            std::printf("  clamped to (%s, %s, %s) by %s\n", human(fit.used.m1).c_str(),
                        human(fit.used.m2).c_str(), human(fit.used.m3).c_str(), joined.c_str());
        }
        std::printf("  eta = %s, xi1 = %s, xi2 = %s\n", human(fit.eta).c_str(),
                    human(fit.xi1).c_str(), human(fit.xi2).c_str());
        std::printf("  max relative moment error vs used moments: %s\n", human(err).c_str());
    }
    return 0;
}

// -------------------------------------------------------- fixed-point ----

int run_fixed_point(const DistArgs& args, int kmax, double tail_eps, const OutputOpts& opts) {
    phlb::ModelParams params = build_params(args);
    phlb::TableOptions topts;
    topts.tail_eps = tail_eps;
    topts.max_levels = kmax;
    phlb::FixedPointTable table = phlb::fixed_point_table(params, topts);

    ordered_json p{{"dist", args.spec}, {"lambda", args.lambda}, {"d", args.d},
                   {"kmax", kmax},      {"tail_eps", tail_eps}};
    ordered_json results;
    results["rho"] = table.rho;
    results["mu"] = table.mu;
    results["theta"] = table.theta;
    results["omega"] = json_row(table.omega);
    ordered_json levels = ordered_json::array();
    for (int k = 1; k <= table.depth(); ++k) {
        const phlb::RowVec& pi = table.levels[static_cast<std::size_t>(k - 1)];
        levels.push_back({{"k", k}, {"pi", json_row(pi)}, {"tail", pi.sum()}});
    }
    results["levels"] = levels;
    ordered_json doc = make_doc("fixed-point", p, results, opts);

    const int m = params.ph.order();
    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        std::vector<std::string> header{"k"};
        for (int i = 1; i <= m; ++i) header.push_back("pi_" + std::to_string(i));
        header.push_back("tail");
        std::vector<std::vector<double>> rows;
        for (int k = 1; k <= table.depth(); ++k) {
            const phlb::RowVec& pi = table.levels[static_cast<std::size_t>(k - 1)];
            std::vector<double> row{static_cast<double>(k)};
            for (int i = 0; i < m; ++i) row.push_back(pi(i));
            row.push_back(pi.sum());
            rows.push_back(std::move(row));
        }
        emit_csv(header, rows);
    } else {
        std::printf("fixed point for %s, lambda=%s, d=%d\n", args.spec.c_str(),
                    human(args.lambda).c_str(), args.d);
        std::printf("  rho = %s, mu = %s, theta = %s\n", human(table.rho).c_str(),
                    human(table.mu).c_str(), human(table.theta).c_str());
        std::string om;
        for (Eigen::Index i = 0; i < table.omega.size(); ++i) {
            if (i) om += ", ";
            om += human(table.omega(i));
        }
        std::printf("  omega = (%s)\n", om.c_str());
        for (int k = 1; k <= table.depth(); ++k) {
            const phlb::RowVec& pi = table.levels[static_cast<std::size_t>(k - 1)];
            std::string comps;
            for (Eigen::Index i = 0; i < pi.size(); ++i) {
                if (i) comps += ", ";
                comps += human(pi(i));
            }
            std::printf("  pi_%d = (%s)  tail %s\n", k, comps.c_str(), human(pi.sum()).c_str());
        }
    }
    return 0;
}

// ------------------------------------------------------------ sojourn ----

int run_sojourn(const DistArgs& args, const OutputOpts& opts) {
    phlb::ModelParams params = build_params(args);
    double t = phlb::expected_sojourn(params);
    const phlb::PhaseType& ph = params.ph;
    double mean = ph.mean();
    double residual_mean = ph.residual().mean();

    ordered_json p{{"dist", args.spec}, {"lambda", args.lambda}, {"d", args.d}};
    ordered_json results{{"sojourn", t},
                         {"rho", params.rho()},
                         {"theta", ph.theta(args.d)},
                         {"mean_service", mean},
                         {"mean_residual", residual_mean}};
    ordered_json doc = make_doc("sojourn", p, results, opts);

    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        emit_csv({"lambda", "d", "sojourn", "rho", "theta", "mean_service", "mean_residual"},
                 {{args.lambda, static_cast<double>(args.d), t, params.rho(), ph.theta(args.d),
                   mean, residual_mean}});
    } else {
        std::printf("expected sojourn for %s, lambda=%s, d=%d\n", args.spec.c_str(),
                    human(args.lambda).c_str(), args.d);
        std::printf("  E[T] = %s  (mean service %s, residual mean %s)\n", human(t).c_str(),
                    human(mean).c_str(), human(residual_mean).c_str());
    }
    return 0;
}

// ---------------------------------------------------------------- ode ----

phlb::MeanFieldState load_state(const std::string& path, int order) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open init file: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("levels") || !j["levels"].is_array())
        throw std::invalid_argument("init file must contain a 'levels' array");
    const auto& levels = j["levels"];
    phlb::MeanFieldState state = phlb::empty_state(order, std::max<int>(1, levels.size()));
    if (j.contains("t")) state.t = j["t"].get<double>();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto& row = levels[k];
        if (!row.is_array() || static_cast<int>(row.size()) != order)
            throw std::invalid_argument("init level rows must have one entry per phase");
        for (int i = 0; i < order; ++i) state.levels[k](i) = row[i].get<double>();
    }
    return state;
}

int run_ode(const DistArgs& args, double horizon, int kmax, const std::string& init,
            bool stationary, double step_scale, int samples, double tol, const OutputOpts& opts) {
    phlb::ModelParams params = build_params(args);
    params.require_stable();
    phlb::OdeOptions oopts;
    oopts.step_scale = step_scale;
    oopts.samples = samples;
    oopts.depth = kmax;

    phlb::FixedPointTable table = phlb::fixed_point_table(params);
    ordered_json p{{"dist", args.spec},   {"lambda", args.lambda}, {"d", args.d},
                   {"horizon", horizon},  {"kmax", kmax},          {"init", init},
                   {"stationary", stationary}, {"step_scale", step_scale}};
    ordered_json results;

    if (stationary) {
        phlb::MeanFieldState state = phlb::stationary_solve(params, tol, oopts);
        results["t"] = state.t;
        ordered_json levels = ordered_json::array();
        ordered_json tails = ordered_json::array();
        for (int k = 1; k <= state.depth(); ++k) {
            levels.push_back(json_row(state.levels[static_cast<std::size_t>(k - 1)]));
            tails.push_back(state.tail(k));
        }
        results["levels"] = levels;
        results["tails"] = tails;
        results["phi_vs_fixed_point"] = phlb::lyapunov_distance(state, table);
        ordered_json doc = make_doc("ode", p, results, opts);
        if (opts.json) {
            emit_json(doc);
        } else if (opts.csv) {
            std::vector<std::vector<double>> rows;
            for (int k = 1; k <= state.depth(); ++k)
                rows.push_back({static_cast<double>(k), state.tail(k), table.tail(k)});
            emit_csv({"k", "ode_tail", "fixed_point_tail"}, rows);
        } else {
            std::printf("mean-field stationary point for %s, lambda=%s, d=%d (t=%s)\n",
                        args.spec.c_str(), human(args.lambda).c_str(), args.d,
                        human(state.t).c_str());
            for (int k = 1; k <= state.depth(); ++k)
                std::printf("  k=%d  ode tail %s   fixed-point tail %s\n", k,
                            human(state.tail(k)).c_str(), human(table.tail(k)).c_str());
        }
        return 0;
    }

    phlb::MeanFieldState init_state;
    if (init == "empty") {
        init_state = phlb::empty_state(params.ph.order(),
                                       oopts.depth > 0 ? oopts.depth : table.depth() + 4);
    } else if (init == "fixed-point") {
        init_state = phlb::state_from_table(table, oopts.depth);
    } else {
        init_state = load_state(init, params.ph.order());
    }

    phlb::Trajectory traj = phlb::integrate(init_state, params, horizon, oopts);
    results["step"] = traj.step;
    results["halvings"] = traj.halvings;
    results["halving_diff"] = traj.halving_diff;
    ordered_json samples_json = ordered_json::array();
    for (const auto& s : traj.samples) {
        ordered_json tails = ordered_json::array();
        for (int k = 1; k <= s.depth(); ++k) tails.push_back(s.tail(k));
        samples_json.push_back(
            {{"t", s.t}, {"tails", tails}, {"phi", phlb::lyapunov_distance(s, table)}});
    }
    results["samples"] = samples_json;
    ordered_json doc = make_doc("ode", p, results, opts);

    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        const int depth = traj.samples.empty() ? 0 : traj.samples.front().depth();
        std::vector<std::string> header{"t"};
        for (int k = 1; k <= depth; ++k) header.push_back("tail_" + std::to_string(k));
        header.push_back("phi");
        std::vector<std::vector<double>> rows;
        for (const auto& s : traj.samples) {
            std::vector<double> row{s.t};
            for (int k = 1; k <= depth; ++k) row.push_back(s.tail(k));
            row.push_back(phlb::lyapunov_distance(s, table));
            rows.push_back(std::move(row));
        }
        emit_csv(header, rows);
    } else {
        std::printf("mean-field trajectory for %s, lambda=%s, d=%d, horizon %s (step %s)\n",
                    args.spec.c_str(), human(args.lambda).c_str(), args.d,
                    human(horizon).c_str(), human(traj.step).c_str());
        const auto& last = traj.samples.back();
        std::printf("  phi(0) = %s, phi(T) = %s\n",
                    human(phlb::lyapunov_distance(traj.samples.front(), table)).c_str(),
                    human(phlb::lyapunov_distance(last, table)).c_str());
        for (int k = 1; k <= last.depth() && k <= 8; ++k)
            std::printf("  k=%d  tail(T) %s   fixed-point tail %s\n", k,
                        human(last.tail(k)).c_str(), human(table.tail(k)).c_str());
    }
    return 0;
}

// ----------------------------------------------------------- simulate ----

ordered_json stats_json(const phlb::SimStats& stats) {
    ordered_json results;
    results["replications"] = static_cast<int>(stats.reps.size());
    results["mean_response"] = stats.mean_response;
    results["ci_half_width"] = stats.ci_infinite ? ordered_json() : ordered_json(stats.ci_half);
    results["little_ratio"] = stats.little_ratio;
    results["completed"] = stats.completed;
    results["overloaded"] = stats.overloaded;
    ordered_json tails = ordered_json::array();
    for (std::size_t k = 0; k < stats.tail_fractions.size(); ++k)
        tails.push_back(stats.tail_fractions[k]);
    results["tail_fractions"] = tails;
    ordered_json per_rep = ordered_json::array();
    for (const auto& r : stats.reps) {
        per_rep.push_back({{"mean_response", r.mean_response},
                           {"little_ratio", r.little_ratio},
                           {"completed", r.completed}});
    }
    results["per_replication"] = per_rep;
    return results;
}

int run_simulate(const DistArgs& args, int n, double horizon, double warmup, int reps,
                 std::uint64_t seed, int tail_depth, const OutputOpts& opts) {
    phlb::SimConfig cfg(phlb::parse_dist(args.spec));
    cfg.n = n;
    cfg.d = args.d;
    cfg.lambda = args.lambda;
    cfg.horizon = horizon;
    cfg.warmup = warmup;
    cfg.seed = seed;
    cfg.replications = reps;
    cfg.tail_depth = tail_depth;
    cfg.validate();

    phlb::SimStats stats = phlb::simulate(cfg);

    ordered_json p{{"dist", args.spec}, {"lambda", args.lambda}, {"d", args.d},
                   {"n", n},            {"horizon", horizon},    {"warmup", cfg.warmup_time()},
                   {"replications", reps}, {"tail_depth", tail_depth}};
    ordered_json results = stats_json(stats);
    ordered_json doc = make_doc("simulate", p, results, opts, seed);

    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        std::vector<std::string> header{"rep", "mean_response", "little_ratio", "completed"};
        for (int k = 1; k <= tail_depth; ++k) header.push_back("tail_" + std::to_string(k));
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < stats.reps.size(); ++r) {
            std::vector<double> row{static_cast<double>(r), stats.reps[r].mean_response,
                                    stats.reps[r].little_ratio,
                                    static_cast<double>(stats.reps[r].completed)};
            for (double f : stats.reps[r].tail_fractions) row.push_back(f);
            rows.push_back(std::move(row));
        }
        emit_csv(header, rows);
    } else {
        std::printf("simulated %d server(s), %s, lambda=%s, d=%d, %d replication(s)\n", n,
                    args.spec.c_str(), human(args.lambda).c_str(), args.d,
                    static_cast<int>(stats.reps.size()));
        if (stats.overloaded)
            std::printf("  warning: system appears overloaded; estimates are not stationary\n");
        if (stats.ci_infinite)
            std::printf("  mean response = %s (single replication, no CI)\n",
                        human(stats.mean_response).c_str());
        else
            std::printf("  mean response = %s +- %s (95%% CI)\n",
                        human(stats.mean_response).c_str(), human(stats.ci_half).c_str());
        std::printf("  little's law ratio = %s, completions = %llu\n",
                    human(stats.little_ratio).c_str(),
                    static_cast<unsigned long long>(stats.completed));
        for (std::size_t k = 0; k < stats.tail_fractions.size() && k < 8; ++k)
            std::printf("  fraction with >= %zu jobs: %s\n", k + 1,
                        human(stats.tail_fractions[k]).c_str());
    }
    return 0;
}

// ------------------------------------------------------------ compare ----

int run_compare(const DistArgs& args, int n, double horizon, double warmup, int reps,
                std::uint64_t seed, int kmax, const OutputOpts& opts) {
    phlb::ModelParams params = build_params(args);
    params.require_stable();

    phlb::TableOptions topts;
    topts.max_levels = kmax;
    phlb::FixedPointTable table = phlb::fixed_point_table(params, topts);
    double analytic_sojourn = phlb::expected_sojourn(params);

    // Truncating the ODE at the display depth would bias the levels shown
    // (the closure S_{K+1} = 0 drains level K), so solve at the depth the
    // tails actually need and only print the first kmax rows.
    phlb::TableOptions deep;
    deep.tail_eps = 1e-12;
    phlb::OdeOptions oopts;
    oopts.depth = std::max(kmax + 1, phlb::fixed_point_table(params, deep).depth() + 1);
    phlb::MeanFieldState stationary = phlb::stationary_solve(params, 1e-10, oopts);

    phlb::SimConfig cfg(params.ph);
    cfg.n = n;
    cfg.d = args.d;
    cfg.lambda = args.lambda;
    cfg.horizon = horizon;
    cfg.warmup = warmup;
    cfg.seed = seed;
    cfg.replications = reps;
    cfg.tail_depth = std::max(kmax, 8);
    cfg.validate();
    phlb::SimStats stats = phlb::simulate(cfg);

    // Exponential reference with the same mean keeps the service-form effect visible.
    phlb::ModelParams exp_params(phlb::exponential(1.0 / params.ph.mean()), args.lambda, args.d);
    phlb::FixedPointTable exp_table = phlb::fixed_point_table(exp_params, topts);
    double exp_sojourn = phlb::expected_sojourn(exp_params);

    ordered_json p{{"dist", args.spec}, {"lambda", args.lambda}, {"d", args.d},
                   {"n", n},            {"horizon", horizon},    {"replications", reps},
                   {"kmax", kmax}};
    ordered_json rows = ordered_json::array();
    for (int k = 1; k <= kmax; ++k) {
        double sim_tail =
            k <= static_cast<int>(stats.tail_fractions.size()) ? stats.tail_fractions[k - 1] : 0.0;
        rows.push_back({{"k", k},
                        {"fixed_point", table.tail(k)},
                        {"ode", k <= stationary.depth() ? stationary.tail(k) : 0.0},
                        {"simulation", sim_tail},
                        {"exp_reference", exp_table.tail(k)}});
    }
    ordered_json results;
    results["tails"] = rows;
    results["sojourn"] = {{"fixed_point", analytic_sojourn},
                          {"simulation", stats.mean_response},
                          {"simulation_ci_half", stats.ci_infinite ? ordered_json()
                                                                   : ordered_json(stats.ci_half)},
                          {"exp_reference", exp_sojourn}};
    results["little_ratio"] = stats.little_ratio;
    phlb::BalanceReport balance = phlb::balance_residuals(params, kmax);
    results["max_scalar_residual"] = balance.max_scalar();
    results["max_vector_residual"] = balance.max_vector();
    ordered_json doc = make_doc("compare", p, results, opts, seed);

    if (opts.json) {
        emit_json(doc);
    } else if (opts.csv) {
        std::vector<std::vector<double>> crow;
        for (int k = 1; k <= kmax; ++k) {
            double sim_tail = k <= static_cast<int>(stats.tail_fractions.size())
                                  ? stats.tail_fractions[k - 1]
                                  : 0.0;
            crow.push_back({static_cast<double>(k), table.tail(k),
                            k <= stationary.depth() ? stationary.tail(k) : 0.0, sim_tail,
                            exp_table.tail(k)});
        }
        emit_csv({"k", "fixed_point_tail", "ode_tail", "sim_tail", "exp_reference_tail"}, crow);
    } else {
        std::printf("comparison for %s, lambda=%s, d=%d (n=%d, %d replication(s))\n",
                    args.spec.c_str(), human(args.lambda).c_str(), args.d, n, reps);
        std::printf("  %-3s %-14s %-14s %-14s %-14s\n", "k", "fixed point", "ode", "simulation",
                    "exp reference");
        for (int k = 1; k <= kmax; ++k) {
            double sim_tail = k <= static_cast<int>(stats.tail_fractions.size())
                                  ? stats.tail_fractions[k - 1]
                                  : 0.0;
            std::printf("  %-3d %-14s %-14s %-14s %-14s\n", k, human(table.tail(k)).c_str(),
                        human(k <= stationary.depth() ? stationary.tail(k) : 0.0).c_str(),
                        human(sim_tail).c_str(), human(exp_table.tail(k)).c_str());
        }
        std::printf("  sojourn: fixed point %s, simulated %s", human(analytic_sojourn).c_str(),
                    human(stats.mean_response).c_str());
        if (!stats.ci_infinite) std::printf(" +- %s", human(stats.ci_half).c_str());
        std::printf(", exp reference %s\n", human(exp_sojourn).c_str());
        std::printf("  little's law ratio = %s\n", human(stats.little_ratio).c_str());
        if (params.ph.order() > 1)
            std::printf("  note: componentwise balance residual %s (scalar %s); the closed form\n"
                        "  satisfies the aggregated equations only, so ODE and fixed-point\n"
                        "  columns can differ for multi-phase service\n",
                        human(balance.max_vector()).c_str(), human(balance.max_scalar()).c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized load balancing with phase-type service"};
    app.set_version_flag("--version", PHLB_VERSION);
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "fit a two-phase distribution to three moments");
    std::vector<double> moments(3);
    fit->add_option("--m1", moments[0], "first moment")->required();
    fit->add_option("--m2", moments[1], "second moment")->required();
    fit->add_option("--m3", moments[2], "third moment")->required();
    OutputOpts fit_opts;
    add_output_flags(fit, fit_opts);

    // fixed-point
    auto* fp = app.add_subcommand("fixed-point", "stationary queue-length fixed point");
    DistArgs fp_args;
    add_model_options(fp, fp_args);
    int fp_kmax = 0;
    double fp_eps = 1e-16;
    fp->add_option("--kmax", fp_kmax, "number of levels to emit (0 = until tail < eps)");
    fp->add_option("--tail-eps", fp_eps, "stop once a level's tail falls below this");
    OutputOpts fp_opts;
    add_output_flags(fp, fp_opts);

    // sojourn
    auto* so = app.add_subcommand("sojourn", "expected stationary sojourn time");
    DistArgs so_args;
    add_model_options(so, so_args);
    OutputOpts so_opts;
    add_output_flags(so, so_opts);

    // ode
    auto* ode = app.add_subcommand("ode", "mean-field ODE trajectory or stationary point");
    DistArgs ode_args;
    add_model_options(ode, ode_args);
    double ode_horizon = 100.0;
    int ode_kmax = 0;
    std::string ode_init = "empty";
    bool ode_stationary = false;
    double ode_scale = 0.01;
    int ode_samples = 512;
    double ode_tol = 1e-10;
    ode->add_option("--horizon", ode_horizon, "integration horizon");
    ode->add_option("--kmax", ode_kmax, "truncation depth (0 = automatic)");
    ode->add_option("--init", ode_init, "empty | fixed-point | FILE.json");
    ode->add_flag("--stationary", ode_stationary, "integrate to the stationary point");
    ode->add_option("--step-scale", ode_scale, "step = scale / (lambda + mu * order)");
    ode->add_option("--samples", ode_samples, "trajectory samples to keep");
    ode->add_option("--tol", ode_tol, "stationary sup-derivative tolerance");
    OutputOpts ode_opts;
    add_output_flags(ode, ode_opts);

    // simulate
    auto* sim = app.add_subcommand("simulate", "discrete event simulation");
    DistArgs sim_args;
    add_model_options(sim, sim_args);
    int sim_n = 100;
    double sim_horizon = 1000.0;
    double sim_warmup = -1.0;
    int sim_reps = 1;
    std::uint64_t sim_seed = 1;
    int sim_tail = 16;
    sim->add_option("--n", sim_n, "number of servers")->check(CLI::PositiveNumber);
    sim->add_option("--horizon", sim_horizon, "simulated time horizon");
    sim->add_option("--warmup", sim_warmup, "warmup time to discard (default 10% of horizon)");
    sim->add_option("--reps,--replications", sim_reps, "independent replications")
        ->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "base RNG seed");
    sim->add_option("--tail-depth", sim_tail, "queue-length tail depth to record");
    OutputOpts sim_opts;
    add_output_flags(sim, sim_opts);

    // compare
    auto* cmp = app.add_subcommand("compare", "fixed point vs ODE vs simulation side by side");
    DistArgs cmp_args;
    add_model_options(cmp, cmp_args);
    int cmp_n = 100;
    double cmp_horizon = 1000.0;
    double cmp_warmup = -1.0;
    int cmp_reps = 5;
    std::uint64_t cmp_seed = 1;
    int cmp_kmax = 6;
    cmp->add_option("--n", cmp_n, "number of servers")->check(CLI::PositiveNumber);
    cmp->add_option("--horizon", cmp_horizon, "simulated time horizon");
    cmp->add_option("--warmup", cmp_warmup, "warmup time to discard (default 10% of horizon)");
    cmp->add_option("--reps,--replications", cmp_reps, "independent replications")
        ->check(CLI::PositiveNumber);
    cmp->add_option("--seed", cmp_seed, "base RNG seed");
    cmp->add_option("--kmax", cmp_kmax, "levels to compare")->check(CLI::PositiveNumber);
    OutputOpts cmp_opts;
    add_output_flags(cmp, cmp_opts);

    try {
        app.parse(argc, argv);
        if (*fit) return run_fit(moments, fit_opts);
        if (*fp) return run_fixed_point(fp_args, fp_kmax, fp_eps, fp_opts);
        if (*so) return run_sojourn(so_args, so_opts);
        if (*ode)
            return run_ode(ode_args, ode_horizon, ode_kmax, ode_init, ode_stationary, ode_scale,
                           ode_samples, ode_tol, ode_opts);
        if (*sim)
            return run_simulate(sim_args, sim_n, sim_horizon, sim_warmup, sim_reps, sim_seed,
                                sim_tail, sim_opts);
        if (*cmp)
            return run_compare(cmp_args, cmp_n, cmp_horizon, cmp_warmup, cmp_reps, cmp_seed,
                               cmp_kmax, cmp_opts);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const phlb::UnstableModel& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const phlb::NumericalFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const phlb::FitError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
