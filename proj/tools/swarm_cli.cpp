// Command-line front end: simulate / classify / sweep / stability.
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ringswarm/classifier.hpp"
#include "ringswarm/integrator.hpp"
#include "ringswarm/io.hpp"
#include "ringswarm/model.hpp"
#include "ringswarm/observables.hpp"
#include "ringswarm/stability.hpp"
#include "ringswarm/sweep.hpp"
#include "ringswarm/version.hpp"

namespace rs = ringswarm;

namespace {

struct RunOptions {
    std::size_t n = 500;
    double j = 1.0;
    double nu = 0.0;
    double omega = 0.0;
    std::string dist = "double-delta";
    double p = 0.8;
    double kp = 0.5;
    double kn = -0.5;
    double mu = 0.0;
    double sigma = 0.5;
    double t_end = 100.0;
    double dt = 0.1;
    std::size_t sample_every = 1;
    double transient_fraction = 0.3;
    double average_fraction = 0.1;
    rs::ClassifierThresholds thresholds;
    std::uint64_t seed = 1;
    std::string out = "run_output";
    std::string format = "csv";
    std::string config_file;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config_file, "JSON config file; flags override its values");
    cmd->add_option("--n", o.n, "swarmalator count");
    cmd->add_option("--j", o.j, "position coupling J");
    cmd->add_option("--nu", o.nu, "position natural frequency");
    cmd->add_option("--omega", o.omega, "phase natural frequency");
    cmd->add_option("--dist", o.dist, "coupling distribution")
        ->check(CLI::IsMember({"double-delta", "gaussian", "mixed-gaussian"}));
    cmd->add_option("--p", o.p, "conformist fraction");
    cmd->add_option("--kp", o.kp, "conformist coupling / first mixture mean");
    cmd->add_option("--kn", o.kn, "contrarian coupling / second mixture mean");
    cmd->add_option("--mu", o.mu, "gaussian mean");
    cmd->add_option("--sigma", o.sigma, "gaussian std dev");
    cmd->add_option("--t-end", o.t_end, "integration end time");
    cmd->add_option("--dt", o.dt, "integration step");
    cmd->add_option("--sample-every", o.sample_every, "store every k-th step");
    cmd->add_option("--transient-fraction", o.transient_fraction,
                    "leading fraction dropped before rotation analysis");
    cmd->add_option("--average-fraction", o.average_fraction,
                    "trailing fraction used for time averages");
    cmd->add_option("--v-static", o.thresholds.v_static, "classifier velocity cutoff");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "observable output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

/// Config-file values fill in every option the user did not pass explicitly.
void merge_config_file(const CLI::App* cmd, RunOptions& o) {
    if (o.config_file.empty()) return;
    const rs::json j = rs::read_json(o.config_file);
    auto take = [&](const char* flag, const char* key, auto& target) {
        if (cmd->count(flag) == 0 && j.contains(key))
            target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    take("--n", "n", o.n);
    take("--j", "j", o.j);
    take("--nu", "nu", o.nu);
    take("--omega", "omega", o.omega);
    take("--dist", "dist", o.dist);
    take("--p", "p", o.p);
    take("--kp", "kp", o.kp);
    take("--kn", "kn", o.kn);
    take("--mu", "mu", o.mu);
    take("--sigma", "sigma", o.sigma);
    take("--t-end", "t_end", o.t_end);
    take("--dt", "dt", o.dt);
    take("--sample-every", "sample_every", o.sample_every);
    take("--transient-fraction", "transient_fraction", o.transient_fraction);
    take("--average-fraction", "average_fraction", o.average_fraction);
    take("--v-static", "v_static", o.thresholds.v_static);
    take("--seed", "seed", o.seed);
    take("--out", "out", o.out);
    take("--format", "format", o.format);
}

rs::CouplingDistribution make_distribution(const RunOptions& o) {
    rs::CouplingDistribution dist;
    if (o.dist == "double-delta") dist = rs::DoubleDelta{o.p, o.kp, o.kn};
    else if (o.dist == "gaussian") dist = rs::SingleGaussian{o.mu, o.sigma};
    else dist = rs::MixedGaussian{o.p, o.kp, o.kn, o.sigma};
    rs::validate(dist);
    return dist;
}

rs::IntegrationConfig make_integration(const RunOptions& o) {
    rs::IntegrationConfig cfg{o.dt, o.t_end, o.sample_every, o.transient_fraction,
                              o.average_fraction};
    rs::validate(cfg);
    return cfg;
}

rs::json config_json(const RunOptions& o) {
    return {{"n", o.n},
            {"j", o.j},
            {"nu", o.nu},
            {"omega", o.omega},
            {"dist", o.dist},
            {"p", o.p},
            {"kp", o.kp},
            {"kn", o.kn},
            {"mu", o.mu},
            {"sigma", o.sigma},
            {"t_end", o.t_end},
            {"dt", o.dt},
            {"sample_every", o.sample_every},
            {"transient_fraction", o.transient_fraction},
            {"average_fraction", o.average_fraction},
            {"v_static", o.thresholds.v_static},
            {"seed", o.seed},
            {"out", o.out},
            {"format", o.format}};
}

struct PipelineResult {
    rs::Trajectory traj;
    rs::ObservableSeries series;
    rs::TrailingStats stats;
    rs::StateLabel label;
    rs::ModelParams params;
};

PipelineResult run_pipeline(const RunOptions& o) {
    const rs::CouplingDistribution dist = make_distribution(o);
    const rs::IntegrationConfig icfg = make_integration(o);
    rs::validate(o.thresholds);
    PipelineResult r;
    r.params = rs::make_params(o.n, dist, rs::derive_seed(o.seed, 1), o.j, o.nu, o.omega);
    const rs::SwarmState state0 = rs::init_random(r.params, rs::derive_seed(o.seed, 2));
    r.traj = rs::integrate(state0, r.params, icfg);
    r.series = rs::observable_series(r.traj, r.params, icfg);
    const rs::RotationSummary rot = rs::rotation_fractions(r.traj, icfg);
    r.stats = {r.series.mean_s_max, r.series.mean_s_min, r.series.mean_v, rot.frac_x,
               rot.frac_theta};
    r.label = rs::classify(r.stats, o.thresholds);
    return r;
}

int cmd_simulate(const RunOptions& o) {
    const auto t_start = std::chrono::steady_clock::now();
    const PipelineResult r = run_pipeline(o);
    const std::filesystem::path outdir(o.out);

    rs::write_trajectory_csv(outdir / "trajectory.csv", r.traj);
    rs::write_trajectory_unwrapped_csv(outdir / "trajectory_unwrapped.csv", r.traj);
    if (o.format == "json") {
        rs::json series = {{"t", r.series.t},           {"s_plus", r.series.s_plus},
                           {"s_minus", r.series.s_minus}, {"s_max", r.series.s_max},
                           {"s_min", r.series.s_min},   {"v_inst", r.series.v_inst}};
        rs::write_json(outdir / "observables.json", series);
    } else {
        rs::write_observables_csv(outdir / "observables.csv", r.series);
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    rs::json manifest = {{"command", "simulate"},
                         {"version", rs::version},
                         {"config", config_json(o)},
                         {"elapsed_seconds", elapsed},
                         {"results",
                          {{"label", rs::to_string(r.label)},
                           {"stats", rs::to_json(r.stats)},
                           {"aliasing_warning", r.traj.aliasing_warning}}}};
    rs::write_json(outdir / "manifest.json", manifest);
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_classify(const RunOptions& o) {
    const PipelineResult r = run_pipeline(o);
    const rs::json out = {{"label", rs::to_string(r.label)}, {"stats", rs::to_json(r.stats)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              unsigned workers_override, bool quiet) {
    rs::SweepConfig cfg = rs::sweep_config_from_json(rs::read_json(config_path));
    if (!out_override.empty()) cfg.output_path = out_override;
    if (workers_override != 0) cfg.workers = workers_override;
    cfg.verbose = !quiet;
    rs::run_sweep(cfg);
    std::cout << "{\"output_path\": \"" << cfg.output_path << "\"}\n";
    return 0;
}

int cmd_stability(double p, double kp, double kn, double j, std::size_t n,
                  const std::string& state, bool verify_numeric, double merge_tol) {
    const bool polarized = state == "polarized";
    rs::json out;
    out["parameters"] = {{"p", p}, {"kp", kp}, {"kn", kn}, {"j", j}, {"n", n},
                         {"state", state}};
    const rs::EigenSpectrum analytic = polarized
                                           ? rs::polarized_eigenvalues(j, kp, kn, p, n)
                                           : rs::sync_eigenvalues(j, kp, kn, p, n);
    out["analytic_spectrum"] = rs::to_json(analytic);
    out["verdict"] = rs::to_json(polarized ? rs::polarized_stability(j, kp, kn, p)
                                           : rs::sync_stability(j, kp, kn, p));
    rs::json curves = {{"kn_saddle", rs::kn_saddle(p, kp)}, {"kn_hopf", rs::kn_hopf(j)}};
    try {
        curves["p_async"] = rs::async_threshold(rs::DoubleDelta{p, kp, kn}, j).value;
    } catch (const rs::UndefinedThreshold&) {
        curves["p_async"] = nullptr;
    }
    out["critical_curves"] = curves;
    if (verify_numeric) {
        const rs::ModelParams params =
            rs::make_params(n, rs::DoubleDelta{p, kp, kn}, 0, j);
        const rs::EigenSpectrum numeric = rs::numeric_jacobian_spectrum(
            params, polarized ? rs::FixedPointKind::polarized : rs::FixedPointKind::sync,
            merge_tol);
        out["numeric_spectrum"] = rs::to_json(numeric);
        out["max_mismatch"] = rs::max_spectrum_mismatch(analytic, numeric);
    } else {
        out["numeric_spectrum"] = nullptr;
        out["max_mismatch"] = nullptr;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D ring swarmalator simulator with mixed phase couplings"};
    app.require_subcommand(1);

    RunOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "integrate and export trajectory files");
    add_run_options(simulate, sim_opts);

    RunOptions cls_opts;
    auto* classify = app.add_subcommand("classify", "simulate in memory and print the state label");
    add_run_options(classify, cls_opts);

    std::string sweep_config, sweep_out;
    unsigned sweep_workers = 0;
    bool sweep_quiet = false;
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid from a JSON config");
    sweep->add_option("config", sweep_config, "sweep config JSON file")->required();
    sweep->add_option("--out", sweep_out, "override output_path");
    sweep->add_option("--workers", sweep_workers, "override worker count");
    sweep->add_flag("--quiet", sweep_quiet, "suppress progress lines");

    double st_p = 0.8, st_kp = 0.5, st_kn = -0.5, st_j = 1.0, st_merge_tol = 1e-7;
    std::size_t st_n = 40;
    std::string st_state = "polarized";
    bool st_verify = false;
    auto* stability = app.add_subcommand("stability", "closed-form spectra and verdicts");
    stability->add_option("--p", st_p, "conformist fraction");
    stability->add_option("--kp", st_kp, "conformist coupling");
    stability->add_option("--kn", st_kn, "contrarian coupling");
    stability->add_option("--j", st_j, "position coupling");
    stability->add_option("--n", st_n, "population size for multiplicities");
    stability->add_option("--state", st_state, "fixed point to analyze")
        ->check(CLI::IsMember({"polarized", "sync"}));
    stability->add_flag("--verify-numeric", st_verify,
                        "cross-check against the finite-difference Jacobian spectrum");
    stability->add_option("--merge-tol", st_merge_tol, "numeric eigenvalue merge tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            merge_config_file(simulate, sim_opts);
            return cmd_simulate(sim_opts);
        }
        if (classify->parsed()) {
            merge_config_file(classify, cls_opts);
            return cmd_classify(cls_opts);
        }
        if (sweep->parsed())
            return cmd_sweep(sweep_config, sweep_out, sweep_workers, sweep_quiet);
        if (stability->parsed())
            return cmd_stability(st_p, st_kp, st_kn, st_j, st_n, st_state, st_verify,
                                 st_merge_tol);
    } catch (const rs::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
