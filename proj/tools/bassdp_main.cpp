#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>

#include "bassdp/config.hpp"
#include "bassdp/det_optimal.hpp"
#include "bassdp/experiments.hpp"
#include "bassdp/io.hpp"
#include "bassdp/policies.hpp"
#include "bassdp/rng.hpp"
#include "bassdp/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace bassdp;

struct CliArgs {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> assignments;
};

RunConfig build_config(const CliArgs& args) {
    RunConfig config;
    if (!args.config_path.empty()) config = config_load(args.config_path);
    for (const auto& [key, value] : args.assignments) config_apply(config, key, value);
    config.validate_and_materialize();
    return config;
}

void add_key_options(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config_path, "key = value config file");
    static const char* keys[] = {
        "alpha", "beta", "m", "m_grid", "horizon", "phi", "delta", "p_explore",
        "policy", "fixed_price", "replicates", "seed", "out_dir", "points",
        "epsilon", "budget_n", "dp_time_steps", "dp_price_points", "dp_price_max",
        "slack_derivative", "slack_kl", "slope_min", "slope_max", "config_version"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [&args, key](const std::string& value) { args.assignments.emplace_back(key, value); },
            std::string("config key ") + key);
    }
}

void write_echo(const RunConfig& config) {
    ensure_dir(config.out_dir);
    write_text_file(config.out_dir + "/config_echo.txt", config.echo());
}

MarketParams market_of(const RunConfig& config) {
    MarketParams params{config.m, config.alpha, config.beta, config.phi};
    params.validate();
    return params;
}

json instance_of(const RunConfig& config) {
    json inst;
    inst["alpha"] = config.alpha;
    inst["beta"] = config.beta;
    inst["phi"] = config.phi;
    inst["delta"] = config.delta;
    inst["horizon"] = config.horizon;
    inst["m"] = config.m;
    if (!config.m_grid.empty()) inst["m_grid"] = config.m_grid;
    inst["replicates"] = config.replicates;
    inst["seed"] = config.seed;
    return inst;
}

PolicyConfig policy_config_of(const RunConfig& config, std::int64_t m) {
    return PolicyConfig{m, config.horizon, config.phi, config.delta, config.p_explore};
}

void write_trace_csv(const std::string& path, const SimTrace& trace) {
    CsvWriter csv(path);
    csv.cell(std::string("d")).cell(std::string("tau")).cell(std::string("price"));
    csv.end_row();
    for (std::size_t k = 0; k < trace.arrival_times.size(); ++k) {
        csv.cell(std::int64_t(k + 1)).cell(trace.arrival_times[k]).cell(trace.prices[k]);
        csv.end_row();
    }
}

int cmd_simulate(const RunConfig& config) {
    const MarketParams params = market_of(config);
    write_echo(config);
    const PolicyConfig pc = policy_config_of(config, config.m);
    const PolicyKind kind = policy_kind_from_string(config.policy);
    json reps = json::array();
    for (int r = 0; r < config.replicates; ++r) {
        auto policy = make_policy(kind, pc, params, config.fixed_price);
        const std::uint64_t seed = derive_seed(config.seed, std::uint64_t(r));
        SimTrace trace = simulate(params, config.horizon, *policy, seed);
        write_trace_csv(config.out_dir + "/trace_" + std::to_string(seed) + ".csv", trace);
        if (auto* alg = dynamic_cast<Algorithm1Policy*>(policy.get())) {
            CsvWriter csv(config.out_dir + "/estimator_" + std::to_string(seed) + ".csv");
            csv.cell(std::string("epoch")).cell(std::string("gamma_i")).cell(std::string("alpha_hat"))
                .cell(std::string("A")).cell(std::string("beta_hat")).cell(std::string("B_i"));
            csv.end_row();
            for (const auto& s : alg->snapshots()) {
                csv.cell(s.epoch).cell(s.gamma_i).cell(s.alpha_hat)
                    .cell(s.alpha_radius).cell(s.beta_hat).cell(s.beta_radius);
                csv.end_row();
            }
        }
        json rep;
        rep["replicate"] = r;
        rep["seed"] = seed;
        rep["adopters"] = trace.adopters();
        rep["revenue"] = trace.revenue;
        rep["pseudo_regret"] = pseudo_regret(trace, params, config.horizon);
        reps.push_back(rep);
    }
    json summary;
    summary["command"] = "simulate";
    summary["instance"] = instance_of(config);
    summary["policy"] = config.policy;
    summary["det_value"] = det_value(params, 0.0, config.horizon);
    summary["replicates"] = reps;
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_optimal_curve(const RunConfig& config) {
    const MarketParams params = market_of(config);
    write_echo(config);
    const double x_star = final_adoption(params, config.horizon, 0.0);
    CsvWriter csv(config.out_dir + "/curve.csv");
    csv.cell(std::string("x")).cell(std::string("p_star")).cell(std::string("pi_star"))
        .cell(std::string("remaining_time"));
    csv.end_row();
    for (int j = 0; j < config.points; ++j) {
        const double x = x_star * double(j) / double(config.points - 1);
        const double remaining = config.horizon * (1.0 - x / x_star);
        const double p_star = optimal_price_curve(params, config.horizon, x);
        const double pi_star =
            remaining > 0.0 ? optimal_policy_price(params, x, remaining) : 1.0;
        csv.cell(x).cell(p_star).cell(pi_star).cell(remaining);
        csv.end_row();
    }
    json summary;
    summary["command"] = "optimal-curve";
    summary["instance"] = instance_of(config);
    summary["x_star"] = x_star;
    summary["det_value"] = det_value(params, 0.0, config.horizon);
    summary["price_upper_bound"] = price_upper_bound(params, config.horizon);
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_regret_sweep(const RunConfig& config) {
    write_echo(config);
    SweepSpec spec;
    spec.alpha = config.alpha;
    spec.beta = config.beta;
    spec.phi = config.phi;
    spec.delta = config.delta;
    spec.p_explore = config.p_explore;
    spec.horizon = config.horizon;
    spec.m_grid = config.m_grid.empty() ? std::vector<std::int64_t>{config.m} : config.m_grid;
    spec.policy = policy_kind_from_string(config.policy);
    spec.fixed_price = config.fixed_price;
    spec.replicates = config.replicates;
    spec.seed_base = config.seed;
    if (spec.m_grid.size() < 3)
        std::cerr << "warning: fewer than 3 market sizes, slope omitted\n";

    ExperimentReport report = regret_sweep(spec);
    std::cerr << "regret-sweep wall clock: " << report.wall_clock_seconds << " s\n";

    CsvWriter csv(config.out_dir + "/report.csv");
    csv.cell(std::string("m")).cell(std::string("replicates")).cell(std::string("mean"))
        .cell(std::string("stdev")).cell(std::string("q10")).cell(std::string("q50"))
        .cell(std::string("q90"));
    csv.end_row();
    for (const auto& cell : report.cells) {
        csv.cell(cell.m).cell(cell.replicates).cell(cell.mean).cell(cell.stdev)
            .cell(cell.q10).cell(cell.q50).cell(cell.q90);
        csv.end_row();
    }
    {
        std::string dat;
        for (const auto& cell : report.cells)
            dat += std::to_string(cell.m) + " " + fmt17(cell.mean) + "\n";
        write_text_file(config.out_dir + "/scaling.dat", dat);
    }
    json summary;
    summary["command"] = "regret-sweep";
    summary["instance"] = instance_of(config);
    summary["policy"] = config.policy;
    summary["horizon"] = report.horizon;
    summary["slope_valid"] = report.slope.valid;
    if (report.slope.valid) {
        summary["slope"] = report.slope.slope;
        summary["slope_ci_lo"] = report.slope.ci_lo;
        summary["slope_ci_hi"] = report.slope.ci_hi;
        summary["slope_in_window"] =
            report.slope.slope >= config.slope_min && report.slope.slope <= config.slope_max;
    }
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_coverage(const RunConfig& config) {
    const MarketParams params = market_of(config);
    write_echo(config);
    CoverageResult res = coverage_experiment(params, config.horizon, config.delta,
                                             config.p_explore, config.replicates, config.seed);
    CsvWriter csv(config.out_dir + "/coverage.csv");
    csv.cell(std::string("epoch")).cell(std::string("gamma_i")).cell(std::string("estimated"))
        .cell(std::string("beta_coverage")).cell(std::string("B_i"))
        .cell(std::string("lcb_prices")).cell(std::string("lcb_ordered_freq"));
    csv.end_row();
    for (const auto& e : res.epochs) {
        csv.cell(e.epoch).cell(e.gamma_i).cell(std::int64_t(e.estimated)).cell(e.coverage())
            .cell(e.beta_radius).cell(e.lcb_prices).cell(e.lcb_ordered_freq(res.replicates));
        csv.end_row();
    }
    json summary;
    summary["command"] = "coverage";
    summary["instance"] = instance_of(config);
    summary["replicates"] = res.replicates;
    summary["certified"] = res.certified;
    if (!res.certified) std::cerr << "note: market size below the certified estimation regime\n";
    summary["alpha_coverage"] = res.alpha_coverage();
    summary["alpha_radius"] = res.alpha_radius;
    summary["mean_alpha_hat"] = res.mean_alpha_hat;
    summary["adoption_threshold"] = res.adoption_threshold;
    summary["adoption_freq"] = res.adoption_freq();
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_lower_bound_lab(const RunConfig& config) {
    write_echo(config);
    TwoMarketInstance inst{config.alpha, config.beta, config.epsilon, config.budget_n, config.m};
    DistinguishResult dist = distinguishability_experiment(inst, config.horizon, plugin_mle_rule(),
                                                           config.replicates, config.seed);
    auto gaps = price_gap_experiment(config.alpha, config.beta, config.epsilon, config.horizon,
                                     50, config.slack_derivative);
    CsvWriter csv(config.out_dir + "/price_gap.csv");
    csv.cell(std::string("x")).cell(std::string("gap")).cell(std::string("bound"))
        .cell(std::string("ok"));
    csv.end_row();
    bool gaps_ok = true;
    for (const auto& row : gaps) {
        csv.cell(row.x).cell(row.gap).cell(row.bound).cell(std::int64_t(row.ok));
        csv.end_row();
        gaps_ok = gaps_ok && row.ok;
    }
    json summary;
    summary["command"] = "lower-bound-lab";
    summary["instance"] = instance_of(config);
    summary["n"] = inst.n;
    summary["epsilon"] = inst.epsilon;
    summary["pi_market1"] = dist.pi_market1;
    summary["pi_market2"] = dist.pi_market2;
    summary["wrong_freq_market1"] = dist.wrong_freq_market1;
    summary["wrong_freq_market2"] = dist.wrong_freq_market2;
    summary["accept_freq_market1"] = dist.accept_freq_market1;
    summary["accept_freq_market2"] = dist.accept_freq_market2;
    summary["accept_gap_bound"] = dist.accept_gap_bound;
    summary["mean_llr"] = dist.mean_llr;
    summary["kl_bound"] = dist.kl_bound;
    summary["kl_within_slack"] = dist.mean_llr <= dist.kl_bound * (1.0 + config.slack_kl);
    summary["price_gap_ok"] = gaps_ok;
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_dp_oracle(const RunConfig& config) {
    const MarketParams params = market_of(config);
    write_echo(config);
    const auto grid = uniform_price_grid(config.dp_price_max, config.dp_price_points);
    const double dp = stoch_value_dp(params, config.horizon, config.dp_time_steps, grid);
    const double det = det_value(params, 0.0, config.horizon);
    json summary;
    summary["command"] = "dp-oracle";
    summary["instance"] = instance_of(config);
    summary["stoch_value_dp"] = dp;
    summary["det_value"] = det;
    summary["gap"] = det - dp;
    summary["det_dominates"] = det >= dp - 1e-6;
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bass-market dynamic pricing and demand learning harness"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        int (*run)(const RunConfig&);
        CliArgs args;
    };
    std::vector<Sub> subs;
    subs.push_back({app.add_subcommand("simulate", "run the stochastic market"), cmd_simulate, {}});
    subs.push_back({app.add_subcommand("optimal-curve", "emit the fluid optimal price curve"),
                    cmd_optimal_curve, {}});
    subs.push_back({app.add_subcommand("regret-sweep", "pseudo-regret scaling over market sizes"),
                    cmd_regret_sweep, {}});
    subs.push_back({app.add_subcommand("coverage", "estimator coverage frequencies"),
                    cmd_coverage, {}});
    subs.push_back({app.add_subcommand("lower-bound-lab", "two-market indistinguishability lab"),
                    cmd_lower_bound_lab, {}});
    subs.push_back({app.add_subcommand("dp-oracle", "tiny-market value recursion"),
                    cmd_dp_oracle, {}});
    for (auto& sub : subs) add_key_options(sub.cmd, sub.args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto& sub : subs) {
        if (!sub.cmd->parsed()) continue;
        try {
            const RunConfig config = build_config(sub.args);
            return sub.run(config);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::invalid_argument& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
