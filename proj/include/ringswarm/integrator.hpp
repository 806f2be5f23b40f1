#ifndef RINGSWARM_INTEGRATOR_HPP
#define RINGSWARM_INTEGRATOR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ringswarm/angles.hpp"
#include "ringswarm/errors.hpp"
#include "ringswarm/model.hpp"
#include "ringswarm/rng.hpp"

namespace ringswarm {

struct IntegrationConfig {
    double dt = 0.1;
    double t_end = 100.0;
    std::size_t sample_every = 1;      // store every k-th step
    double transient_fraction = 0.3;   // dropped before rotation analysis
    double average_fraction = 0.1;     // trailing window for time averages
};

inline void validate(const IntegrationConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("integration: dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("integration: t_end must be positive");
    if (cfg.sample_every < 1) throw ConfigError("integration: sample_every must be >= 1");
    if (!(cfg.transient_fraction >= 0.0 && cfg.transient_fraction < 1.0))
        throw ConfigError("integration: transient_fraction must lie in [0, 1)");
    if (!(cfg.average_fraction > 0.0 && cfg.average_fraction <= 1.0))
        throw ConfigError("integration: average_fraction must lie in (0, 1]");
}

/// Sampled trajectory. Wrapped states plus per-step-accumulated unwrapped
/// angles; wrap_angle(x_unwrapped[k][i]) equals states[k].x[i] bit-for-bit.
struct Trajectory {
    std::vector<double> times;
    std::vector<SwarmState> states;
    std::vector<std::vector<double>> x_unwrapped;
    std::vector<std::vector<double>> theta_unwrapped;
    /// Set if any single RK4 step moved an angle by >= pi; such a trajectory
    /// cannot be re-unwrapped from its wrapped samples alone.
    bool aliasing_warning = false;

    std::size_t samples() const { return times.size(); }
    std::size_t population() const { return states.empty() ? 0 : states.front().size(); }
};

/// Uniform random initial condition on [0, 2*pi)^2N, deterministic per seed.
inline SwarmState init_random(const ModelParams& params, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(params.n), theta(params.n);
    for (auto& v : x) v = rng.angle();
    for (auto& v : theta) v = rng.angle();
    return SwarmState(std::move(x), std::move(theta), 0.0);
}

/// Low-fluctuation sample of the incoherent state: an exact product grid in
/// (x, theta) with a small jitter, dealt to swarmalator indices through a
/// seeded shuffle so coupling classes are uncorrelated with position.
///
/// A fresh random state carries O(N^(-1/2)) fluctuations in every harmonic,
/// which seed a slow condensation out of incoherence well below the mean
/// coupling threshold; this preparation suppresses those fluctuations to
/// the jitter scale and is the right probe of the threshold itself. Needs a
/// factorization N = mx * mt with both factors >= 2.
inline SwarmState init_incoherent(const ModelParams& params, std::uint64_t seed,
                                  double jitter = 1e-3) {
    const std::size_t n = params.n;
    std::size_t mx = 0, mt = 0;
    for (std::size_t f = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))); f >= 2;
         --f) {
        if (n % f == 0) {
            mt = f;
            mx = n / f;
            break;
        }
    }
    if (mt < 2)
        throw ConfigError("init_incoherent: N must factor as mx * mt with both >= 2");
    Rng rng(seed);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
        std::swap(perm[i], perm[std::min(j, i)]);
    }
    std::vector<double> x(n), theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cell = perm[i];
        x[i] = two_pi * static_cast<double>(cell / mt) / static_cast<double>(mx) +
               jitter * rng.uniform(-1.0, 1.0);
        theta[i] = two_pi * static_cast<double>(cell % mt) / static_cast<double>(mt) +
                   jitter * rng.uniform(-1.0, 1.0);
    }
    return SwarmState(std::move(x), std::move(theta), 0.0);
}

/// Classical fixed-step RK4 on the mean-field right-hand side.
///
/// Unwrapped accumulators advance by the raw per-step displacement every
/// step (independent of sampling), and the stored wrapped state is always
/// wrap_angle of the accumulator. Throws DivergedIntegration on the first
/// non-finite component.
inline Trajectory integrate(const SwarmState& state0, const ModelParams& params,
                            const IntegrationConfig& cfg) {
    validate(cfg);
    check_dimensions(state0, params);
    const std::size_t n = params.n;
    const double dt = cfg.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / dt));

    std::vector<double> xu = state0.x;
    std::vector<double> tu = state0.theta;
    SwarmState current = state0;

    Trajectory traj;
    const std::size_t est = n_steps / cfg.sample_every + 2;
    traj.times.reserve(est);
    traj.states.reserve(est);
    traj.x_unwrapped.reserve(est);
    traj.theta_unwrapped.reserve(est);

    const double t0 = state0.t;
    auto store = [&](std::size_t step) {
        traj.times.push_back(t0 + static_cast<double>(step) * dt);
        traj.states.push_back(current);
        traj.x_unwrapped.push_back(xu);
        traj.theta_unwrapped.push_back(tu);
    };
    store(0);

    SwarmState stage = current;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const Rates k1 = rhs_meanfield(current, params);
        for (std::size_t i = 0; i < n; ++i) {
            stage.x[i] = current.x[i] + 0.5 * dt * k1.dx[i];
            stage.theta[i] = current.theta[i] + 0.5 * dt * k1.dtheta[i];
        }
        const Rates k2 = rhs_meanfield(stage, params);
        for (std::size_t i = 0; i < n; ++i) {
            stage.x[i] = current.x[i] + 0.5 * dt * k2.dx[i];
            stage.theta[i] = current.theta[i] + 0.5 * dt * k2.dtheta[i];
        }
        const Rates k3 = rhs_meanfield(stage, params);
        for (std::size_t i = 0; i < n; ++i) {
            stage.x[i] = current.x[i] + dt * k3.dx[i];
            stage.theta[i] = current.theta[i] + dt * k3.dtheta[i];
        }
        const Rates k4 = rhs_meanfield(stage, params);

        for (std::size_t i = 0; i < n; ++i) {
            const double ddx = dt / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
            const double ddt =
                dt / 6.0 * (k1.dtheta[i] + 2.0 * k2.dtheta[i] + 2.0 * k3.dtheta[i] + k4.dtheta[i]);
            if (!(std::isfinite(ddx) && std::isfinite(ddt)))
                throw DivergedIntegration(step, "integration diverged at step " +
                                                    std::to_string(step) + ", swarmalator " +
                                                    std::to_string(i));
            if (std::abs(ddx) >= pi || std::abs(ddt) >= pi) traj.aliasing_warning = true;
            xu[i] += ddx;
            tu[i] += ddt;
            current.x[i] = wrap_angle(xu[i]);
            current.theta[i] = wrap_angle(tu[i]);
        }
        current.t = t0 + static_cast<double>(step) * dt;

        if (step % cfg.sample_every == 0 || step == n_steps) store(step);
    }
    return traj;
}

} // namespace ringswarm

#endif
