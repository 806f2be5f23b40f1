#ifndef RINGSWARM_SWEEP_HPP
#define RINGSWARM_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ringswarm/classifier.hpp"
#include "ringswarm/integrator.hpp"
#include "ringswarm/io.hpp"
#include "ringswarm/model.hpp"
#include "ringswarm/observables.hpp"
#include "ringswarm/stability.hpp"

namespace ringswarm {

// ---------------------------------------------------------------------------
// Single pipeline run
// ---------------------------------------------------------------------------

struct RunOutcome {
    TrailingStats stats;
    StateLabel label = StateLabel::Unclassified;
    bool diverged = false;
};

/// init_random -> integrate -> summarize -> classify, with the two RNG
/// streams (couplings, initial condition) derived from one run seed.
/// Divergence is reported in the outcome, never thrown.
inline RunOutcome run_one(std::size_t n, const CouplingDistribution& dist, double j,
                          double nu, double omega, const IntegrationConfig& icfg,
                          const ClassifierThresholds& thresholds, std::uint64_t run_seed) {
    const ModelParams params = make_params(n, dist, derive_seed(run_seed, 1), j, nu, omega);
    const SwarmState state0 = init_random(params, derive_seed(run_seed, 2));
    RunOutcome out;
    try {
        const Trajectory traj = integrate(state0, params, icfg);
        out.stats = summarize(traj, params, icfg);
        out.label = classify(out.stats, thresholds);
    } catch (const DivergedIntegration&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.stats = {nan, nan, nan, nan, nan};
        out.label = StateLabel::Unclassified;
        out.diverged = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

struct SweepAxis {
    std::string name; // p | kp | kn | mu | sigma | j
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const {
        // i*step instead of accumulation, clamped so rounding can neither
        // drop the endpoint nor push a value past it (axis values feed
        // distribution validators with hard bounds like p <= 1)
        const auto count =
            static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = std::min(start + static_cast<double>(i) * step, stop);
        return v;
    }
};

struct SweepConfig {
    std::vector<SweepAxis> axes;
    CouplingDistribution dist = DoubleDelta{0.8, 0.5, -0.5};
    double j = 1.0;
    double nu = 0.0;
    double omega = 0.0;
    std::size_t n = 500;
    IntegrationConfig integration{0.1, 400.0, 5, 0.3, 0.1};
    ClassifierThresholds thresholds;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    unsigned workers = 0; // 0 = hardware concurrency
    std::string output_path;
    bool verbose = false;
};

namespace detail {

inline bool axis_applies(const std::string& name, const CouplingDistribution& dist) {
    const bool dd = std::holds_alternative<DoubleDelta>(dist);
    const bool sg = std::holds_alternative<SingleGaussian>(dist);
    const bool mg = std::holds_alternative<MixedGaussian>(dist);
    if (name == "j") return true;
    if (name == "p" || name == "kp" || name == "kn") return dd || mg;
    if (name == "mu") return sg;
    if (name == "sigma") return sg || mg;
    return false;
}

inline void apply_axis(const std::string& name, double value, CouplingDistribution& dist,
                       double& j) {
    if (name == "j") {
        j = value;
        return;
    }
    if (auto* dd = std::get_if<DoubleDelta>(&dist)) {
        if (name == "p") dd->p = value;
        else if (name == "kp") dd->k_p = value;
        else dd->k_n = value;
    } else if (auto* sg = std::get_if<SingleGaussian>(&dist)) {
        if (name == "mu") sg->mu = value;
        else sg->sigma = value;
    } else {
        auto& mg = std::get<MixedGaussian>(dist);
        if (name == "p") mg.p = value;
        else if (name == "kp") mg.k_p = value;
        else if (name == "kn") mg.k_n = value;
        else mg.sigma = value;
    }
}

} // namespace detail

inline void validate(const SweepConfig& cfg) {
    if (cfg.axes.empty() || cfg.axes.size() > 2)
        throw ConfigError("sweep: need 1 or 2 axes");
    for (const auto& ax : cfg.axes) {
        if (!(ax.step > 0.0)) throw ConfigError("sweep: axis step must be positive");
        if (ax.stop < ax.start) throw ConfigError("sweep: axis stop must be >= start");
        if (!detail::axis_applies(ax.name, cfg.dist))
            throw ConfigError("sweep: axis '" + ax.name + "' does not apply to " +
                              distribution_name(cfg.dist) + " couplings");
    }
    if (cfg.seeds.empty()) throw ConfigError("sweep: need at least one seed");
    validate(cfg.integration);
    validate(cfg.thresholds);
    if (cfg.output_path.empty()) throw ConfigError("sweep: output_path is required");
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct SeedResult {
    std::size_t seed_index = 0;
    std::uint64_t run_seed = 0;
    StateLabel label = StateLabel::Unclassified;
    TrailingStats stats;
    bool diverged = false;
};

struct SweepCellResult {
    std::size_t cell_index = 0;
    CouplingDistribution dist; // resolved for this cell
    double j = 1.0;
    std::vector<SeedResult> per_seed;
    StateLabel modal_label = StateLabel::Unclassified;
};

namespace detail {

inline StateLabel modal_label_of(const std::vector<SeedResult>& per_seed) {
    std::map<int, std::size_t> counts;
    for (const auto& r : per_seed) ++counts[static_cast<int>(r.label)];
    int best = static_cast<int>(StateLabel::Unclassified);
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return static_cast<StateLabel>(best);
}

inline json cell_to_json(const SweepCellResult& cell, std::size_t fingerprint) {
    json seeds = json::array();
    for (const auto& r : cell.per_seed) {
        seeds.push_back({{"seed_index", r.seed_index},
                         {"run_seed", r.run_seed},
                         {"label", to_string(r.label)},
                         {"stats", to_json(r.stats)},
                         {"diverged", r.diverged}});
    }
    return {{"cell_index", cell.cell_index},
            {"fingerprint", fingerprint},
            {"dist", to_json(cell.dist)},
            {"j", cell.j},
            {"per_seed", seeds}};
}

inline bool cell_from_json(const json& j, std::size_t expected_index,
                           std::size_t expected_seeds, std::size_t fingerprint,
                           SweepCellResult& out) {
    try {
        if (j.at("cell_index").get<std::size_t>() != expected_index) return false;
        if (j.at("fingerprint").get<std::size_t>() != fingerprint) return false;
        const auto& seeds = j.at("per_seed");
        if (seeds.size() != expected_seeds) return false;
        out.cell_index = expected_index;
        out.dist = distribution_from_json(j.at("dist"));
        out.j = j.at("j").get<double>();
        out.per_seed.clear();
        for (const auto& s : seeds) {
            SeedResult r;
            r.seed_index = s.at("seed_index").get<std::size_t>();
            r.run_seed = s.at("run_seed").get<std::uint64_t>();
            r.label = label_from_string(s.at("label").get<std::string>());
            const auto& st = s.at("stats");
            r.stats = {st.at("s_max").get<double>(), st.at("s_min").get<double>(),
                       st.at("v").get<double>(), st.at("frac_x").get<double>(),
                       st.at("frac_theta").get<double>()};
            r.diverged = s.at("diverged").get<bool>();
            out.per_seed.push_back(r);
        }
        out.modal_label = modal_label_of(out.per_seed);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

/// Stable fingerprint of the parts of the config that determine cell
/// content; a checkpoint from a different config is recomputed, not reused.
inline std::size_t config_fingerprint(const SweepConfig& cfg) {
    json j;
    j["dist"] = to_json(cfg.dist);
    j["j"] = cfg.j;
    j["nu"] = cfg.nu;
    j["omega"] = cfg.omega;
    j["n"] = cfg.n;
    j["dt"] = cfg.integration.dt;
    j["t_end"] = cfg.integration.t_end;
    j["sample_every"] = cfg.integration.sample_every;
    j["transient_fraction"] = cfg.integration.transient_fraction;
    j["average_fraction"] = cfg.integration.average_fraction;
    j["seeds"] = cfg.seeds;
    j["thresholds"] = {cfg.thresholds.v_static, cfg.thresholds.s_high, cfg.thresholds.s_low,
                       cfg.thresholds.frac_high, cfg.thresholds.frac_low};
    json axes = json::array();
    for (const auto& ax : cfg.axes)
        axes.push_back({{"name", ax.name}, {"start", ax.start}, {"stop", ax.stop},
                        {"step", ax.step}});
    j["axes"] = axes;
    return std::hash<std::string>{}(j.dump());
}

} // namespace detail

// ---------------------------------------------------------------------------
// Theory overlay
// ---------------------------------------------------------------------------

struct TheoryCurvePoint {
    std::string curve;
    double p = 0.0;
    double k_n = 0.0;
};

/// Sampled analytic boundary curves for plotting over a double-delta
/// (p, K_n) diagram: the polarized saddle-node and Hopf boundaries and the
/// async threshold p_s(K_n).
inline std::vector<TheoryCurvePoint> overlay_theory(const SweepConfig& cfg,
                                                    std::size_t samples_per_curve = 201) {
    const auto* dd = std::get_if<DoubleDelta>(&cfg.dist);
    if (!dd) throw UnsupportedDistribution("overlay_theory needs a double-delta sweep");
    double p_lo = 0.5, p_hi = 1.0, kn_lo = -2.0, kn_hi = 0.0;
    for (const auto& ax : cfg.axes) {
        if (ax.name == "p") {
            p_lo = ax.start;
            p_hi = ax.stop;
        } else if (ax.name == "kn") {
            kn_lo = ax.start;
            kn_hi = ax.stop;
        }
    }
    std::vector<TheoryCurvePoint> pts;
    const auto m = static_cast<double>(samples_per_curve - 1);
    for (std::size_t i = 0; i < samples_per_curve; ++i) {
        const double p = p_lo + (p_hi - p_lo) * static_cast<double>(i) / m;
        if (p > 0.0) pts.push_back({"saddle_node", p, kn_saddle(p, dd->k_p)});
        pts.push_back({"hopf", p, kn_hopf(cfg.j)});
    }
    for (std::size_t i = 0; i < samples_per_curve; ++i) {
        const double kn = kn_lo + (kn_hi - kn_lo) * static_cast<double>(i) / m;
        if (kn == dd->k_p) continue;
        const double ps = (cfg.j + kn) / (kn - dd->k_p);
        if (ps >= 0.0 && ps <= 1.0) pts.push_back({"async", ps, kn});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Sweep driver
// ---------------------------------------------------------------------------

namespace detail {

inline unsigned effective_workers(const SweepConfig& cfg, std::size_t cells) {
    unsigned w = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
    if (const char* env = std::getenv("SWARM_WORKERS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) w = std::min<unsigned>(w, static_cast<unsigned>(cap));
    }
    w = std::max(1u, std::min<unsigned>(w, static_cast<unsigned>(cells)));
    return w;
}

inline void write_cells_csv(const std::filesystem::path& path, const SweepConfig& cfg,
                            const std::vector<SweepCellResult>& cells);
inline void write_summary_csv(const std::filesystem::path& path, const SweepConfig& cfg,
                              const std::vector<SweepCellResult>& cells);
inline void write_theory_csv(const std::filesystem::path& path,
                             const std::vector<TheoryCurvePoint>& pts);

} // namespace detail

/// Run the grid. Cells execute independently on a bounded worker pool; each
/// finished cell is checkpointed to its own JSON file (atomic rename), and
/// an interrupted sweep resumes from those files. Results and output bytes
/// are independent of the worker count.
inline std::vector<SweepCellResult> run_sweep(const SweepConfig& cfg) {
    validate(cfg);
    const std::filesystem::path outdir(cfg.output_path);
    const std::filesystem::path celldir = outdir / "cells";
    std::filesystem::create_directories(celldir);

    const std::vector<double> axis0 = cfg.axes[0].values();
    const std::vector<double> axis1 =
        cfg.axes.size() > 1 ? cfg.axes[1].values() : std::vector<double>{0.0};
    const std::size_t n_cells = axis0.size() * axis1.size();
    const std::size_t fingerprint = detail::config_fingerprint(cfg);

    std::vector<SweepCellResult> results(n_cells);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto cell_path = [&](std::size_t idx) {
        char name[32];
        std::snprintf(name, sizeof(name), "cell_%06zu.json", idx);
        return celldir / name;
    };

    auto process = [&](std::size_t idx) {
        SweepCellResult cell;
        cell.cell_index = idx;
        cell.dist = cfg.dist;
        cell.j = cfg.j;
        const double v0 = axis0[idx / axis1.size()];
        detail::apply_axis(cfg.axes[0].name, v0, cell.dist, cell.j);
        if (cfg.axes.size() > 1) {
            const double v1 = axis1[idx % axis1.size()];
            detail::apply_axis(cfg.axes[1].name, v1, cell.dist, cell.j);
        }

        const auto path = cell_path(idx);
        if (std::filesystem::exists(path)) {
            try {
                SweepCellResult cached;
                if (detail::cell_from_json(read_json(path), idx, cfg.seeds.size(),
                                           fingerprint, cached)) {
                    results[idx] = std::move(cached);
                    return;
                }
            } catch (const std::exception&) {
                // unreadable checkpoint: recompute below
            }
        }

        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            SeedResult r;
            r.seed_index = si;
            r.run_seed = derive_seed(cfg.seeds[si], idx, si);
            const RunOutcome out = run_one(cfg.n, cell.dist, cell.j, cfg.nu, cfg.omega,
                                           cfg.integration, cfg.thresholds, r.run_seed);
            r.label = out.label;
            r.stats = out.stats;
            r.diverged = out.diverged;
            cell.per_seed.push_back(r);
        }
        cell.modal_label = detail::modal_label_of(cell.per_seed);

        const auto tmp = path.string() + ".tmp";
        write_json(tmp, detail::cell_to_json(cell, fingerprint));
        std::filesystem::rename(tmp, path);
        results[idx] = std::move(cell);
    };

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_cells) return;
            try {
                process(idx);
                if (cfg.verbose)
                    std::fprintf(stderr, "sweep: cell %zu/%zu done\n", idx + 1, n_cells);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    const unsigned n_workers = detail::effective_workers(cfg, n_cells);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    detail::write_cells_csv(outdir / "cells.csv", cfg, results);
    detail::write_summary_csv(outdir / "summary.csv", cfg, results);
    if (std::holds_alternative<DoubleDelta>(cfg.dist))
        detail::write_theory_csv(outdir / "theory_curves.csv", overlay_theory(cfg));
    return results;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

namespace detail {

/// Distribution columns shared by cells.csv and summary.csv. Double-delta
/// fills the canonical p,k_n,k_p triple; the Gaussian families append their
/// own parameters and mark inapplicable columns nan.
inline std::string dist_header(const CouplingDistribution& dist) {
    if (std::holds_alternative<SingleGaussian>(dist)) return "p,k_n,k_p,mu,sigma";
    if (std::holds_alternative<MixedGaussian>(dist)) return "p,k_n,k_p,sigma";
    return "p,k_n,k_p";
}

inline std::string dist_fields(const CouplingDistribution& dist) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (const auto* dd = std::get_if<DoubleDelta>(&dist))
        return fmt_g17(dd->p) + ',' + fmt_g17(dd->k_n) + ',' + fmt_g17(dd->k_p);
    if (const auto* sg = std::get_if<SingleGaussian>(&dist))
        return fmt_g17(nan) + ',' + fmt_g17(nan) + ',' + fmt_g17(nan) + ',' +
               fmt_g17(sg->mu) + ',' + fmt_g17(sg->sigma);
    const auto& mg = std::get<MixedGaussian>(dist);
    return fmt_g17(mg.p) + ',' + fmt_g17(mg.k_n) + ',' + fmt_g17(mg.k_p) + ',' +
           fmt_g17(mg.sigma);
}

inline void write_cells_csv(const std::filesystem::path& path, const SweepConfig& cfg,
                            const std::vector<SweepCellResult>& cells) {
    auto out = open_output(path);
    out << dist_header(cfg.dist)
        << ",j,n,t_end,dt,seed,label,s_max,s_min,v,frac_x,frac_theta\n";
    for (const auto& cell : cells) {
        for (const auto& r : cell.per_seed) {
            out << dist_fields(cell.dist) << ',' << fmt_g17(cell.j) << ',' << cfg.n << ','
                << fmt_g17(cfg.integration.t_end) << ',' << fmt_g17(cfg.integration.dt) << ','
                << r.run_seed << ',' << to_string(r.label) << ',' << fmt_g17(r.stats.s_max)
                << ',' << fmt_g17(r.stats.s_min) << ',' << fmt_g17(r.stats.v) << ','
                << fmt_g17(r.stats.frac_x) << ',' << fmt_g17(r.stats.frac_theta) << "\n";
        }
    }
}

inline void write_summary_csv(const std::filesystem::path& path, const SweepConfig& cfg,
                              const std::vector<SweepCellResult>& cells) {
    auto out = open_output(path);
    out << "cell_index," << dist_header(cfg.dist)
        << ",j,modal_label,n_seeds,n_diverged"
           ",s_max_mean,s_max_std,s_min_mean,s_min_std,v_mean,v_std,"
           "frac_x_mean,frac_theta_mean\n";
    for (const auto& cell : cells) {
        std::size_t diverged = 0;
        std::vector<double> smax, smin, v, fx, ft;
        for (const auto& r : cell.per_seed) {
            if (r.diverged) {
                ++diverged;
                continue;
            }
            smax.push_back(r.stats.s_max);
            smin.push_back(r.stats.s_min);
            v.push_back(r.stats.v);
            fx.push_back(r.stats.frac_x);
            ft.push_back(r.stats.frac_theta);
        }
        auto mean = [](const std::vector<double>& xs) {
            if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
            double s = 0.0;
            for (double x : xs) s += x;
            return s / static_cast<double>(xs.size());
        };
        auto stddev = [&](const std::vector<double>& xs) {
            if (xs.size() < 2) return 0.0;
            const double m = mean(xs);
            double s = 0.0;
            for (double x : xs) s += (x - m) * (x - m);
            return std::sqrt(s / static_cast<double>(xs.size() - 1));
        };
        out << cell.cell_index << ',' << dist_fields(cell.dist) << ',' << fmt_g17(cell.j)
            << ',' << to_string(cell.modal_label) << ',' << cell.per_seed.size() << ','
            << diverged << ',' << fmt_g17(mean(smax)) << ',' << fmt_g17(stddev(smax)) << ','
            << fmt_g17(mean(smin)) << ',' << fmt_g17(stddev(smin)) << ',' << fmt_g17(mean(v))
            << ',' << fmt_g17(stddev(v)) << ',' << fmt_g17(mean(fx)) << ','
            << fmt_g17(mean(ft)) << "\n";
    }
}

inline void write_theory_csv(const std::filesystem::path& path,
                             const std::vector<TheoryCurvePoint>& pts) {
    auto out = open_output(path);
    out << "curve_name,p,k_n\n";
    for (const auto& pt : pts)
        out << pt.curve << ',' << fmt_g17(pt.p) << ',' << fmt_g17(pt.k_n) << "\n";
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sweep config JSON
// ---------------------------------------------------------------------------

inline SweepConfig sweep_config_from_json(const json& j) {
    static const std::vector<std::string> known = {
        "axes", "dist", "p", "kp", "kn", "mu", "sigma", "j", "nu", "omega", "n",
        "t_end", "dt", "sample_every", "transient_fraction", "average_fraction",
        "v_static", "s_high", "s_low", "frac_high", "frac_low",
        "seeds", "workers", "output_path", "verbose"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("sweep config: unknown key '" + key + "'");
    }
    auto need = [&](const char* key) {
        if (!j.contains(key)) throw ConfigError(std::string("sweep config: missing key '") +
                                                key + "'");
        return j.at(key);
    };
    auto get_double = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number())
            throw ConfigError(std::string("sweep config: key '") + key + "' must be a number");
        return j.at(key).get<double>();
    };

    SweepConfig cfg;
    for (const auto& ax : need("axes")) {
        if (!ax.contains("name") || !ax.contains("start") || !ax.contains("stop") ||
            !ax.contains("step"))
            throw ConfigError("sweep config: each axis needs name/start/stop/step");
        cfg.axes.push_back({ax.at("name").get<std::string>(), ax.at("start").get<double>(),
                            ax.at("stop").get<double>(), ax.at("step").get<double>()});
    }
    const std::string dist_name = j.value("dist", "double-delta");
    if (dist_name == "double-delta") {
        cfg.dist = DoubleDelta{get_double("p", 0.8), get_double("kp", 0.5),
                               get_double("kn", -0.5)};
    } else if (dist_name == "gaussian") {
        cfg.dist = SingleGaussian{get_double("mu", 0.0), get_double("sigma", 0.5)};
    } else if (dist_name == "mixed-gaussian") {
        cfg.dist = MixedGaussian{get_double("p", 0.5), get_double("kp", 1.0),
                                 get_double("kn", -2.0), get_double("sigma", 0.5)};
    } else {
        throw ConfigError("sweep config: unknown dist '" + dist_name + "'");
    }
    cfg.j = get_double("j", 1.0);
    cfg.nu = get_double("nu", 0.0);
    cfg.omega = get_double("omega", 0.0);
    cfg.n = j.value("n", std::size_t{500});
    cfg.integration.dt = get_double("dt", 0.1);
    cfg.integration.t_end = get_double("t_end", 400.0);
    cfg.integration.sample_every = j.value("sample_every", std::size_t{5});
    cfg.integration.transient_fraction = get_double("transient_fraction", 0.3);
    cfg.integration.average_fraction = get_double("average_fraction", 0.1);
    cfg.thresholds.v_static = get_double("v_static", 1e-3);
    cfg.thresholds.s_high = get_double("s_high", 0.9);
    cfg.thresholds.s_low = get_double("s_low", 0.1);
    cfg.thresholds.frac_high = get_double("frac_high", 0.9);
    cfg.thresholds.frac_low = get_double("frac_low", 0.1);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.workers = j.value("workers", 0u);
    cfg.output_path = j.value("output_path", std::string{});
    cfg.verbose = j.value("verbose", false);
    return cfg;
}

} // namespace ringswarm

#endif
