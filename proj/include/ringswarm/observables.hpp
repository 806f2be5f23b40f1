#ifndef RINGSWARM_OBSERVABLES_HPP
#define RINGSWARM_OBSERVABLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ringswarm/errors.hpp"
#include "ringswarm/integrator.hpp"
#include "ringswarm/model.hpp"

namespace ringswarm {

// ---------------------------------------------------------------------------
// Rainbow order parameters
// ---------------------------------------------------------------------------

/// W+- = S+- e^{i phi+-} = mean of e^{i(x +- theta)}, plus the
/// degeneracy-free s_max = max(S+, S-), s_min = min(S+, S-).
struct OrderParams {
    double s_plus = 0.0;
    double phi_plus = 0.0;
    double s_minus = 0.0;
    double phi_minus = 0.0;
    double s_max = 0.0;
    double s_min = 0.0;
};

inline OrderParams order_params(const SwarmState& state) {
    const std::size_t n = state.size();
    double pr = 0.0, pim = 0.0, mr = 0.0, mim = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = state.x[i] + state.theta[i];
        const double eta = state.x[i] - state.theta[i];
        pr += std::cos(xi);
        pim += std::sin(xi);
        mr += std::cos(eta);
        mim += std::sin(eta);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    OrderParams op;
    op.s_plus = std::hypot(pr, pim) * inv_n;
    op.phi_plus = std::atan2(pim, pr);
    op.s_minus = std::hypot(mr, mim) * inv_n;
    op.phi_minus = std::atan2(mim, mr);
    op.s_max = std::max(op.s_plus, op.s_minus);
    op.s_min = std::min(op.s_plus, op.s_minus);
    return op;
}

// ---------------------------------------------------------------------------
// Window helpers
// ---------------------------------------------------------------------------

/// First sample index of the trailing averaging window.
inline std::size_t averaging_start(std::size_t samples, double average_fraction) {
    const auto w = static_cast<std::size_t>(
        std::ceil(average_fraction * static_cast<double>(samples)));
    return samples - std::min(std::max<std::size_t>(w, 1), samples);
}

/// First sample index after the transient cut.
inline std::size_t transient_end(std::size_t samples, double transient_fraction) {
    return static_cast<std::size_t>(
        std::floor(transient_fraction * static_cast<double>(samples)));
}

// ---------------------------------------------------------------------------
// Mean velocity
// ---------------------------------------------------------------------------

/// V = population and trailing-window average of |dx|. Rates are recomputed
/// from the mean-field right-hand side at the stored samples. When
/// subtract_drift is set, nu is removed from each rate before taking the
/// magnitude (co-moving measurement; identical for the nu = 0 default).
inline double mean_velocity(const Trajectory& traj, const ModelParams& params,
                            const IntegrationConfig& cfg, bool subtract_drift = false) {
    const std::size_t m = traj.samples();
    const std::size_t start = averaging_start(m, cfg.average_fraction);
    if (m - start < 2)
        throw InsufficientData("mean_velocity: averaging window has fewer than 2 samples");
    const double drift = subtract_drift ? params.nu : 0.0;
    double acc = 0.0;
    for (std::size_t s = start; s < m; ++s) {
        const Rates r = rhs_meanfield(traj.states[s], params);
        double sum = 0.0;
        for (double v : r.dx) sum += std::abs(v - drift);
        acc += sum / static_cast<double>(params.n);
    }
    return acc / static_cast<double>(m - start);
}

// ---------------------------------------------------------------------------
// Rotation fractions
// ---------------------------------------------------------------------------

/// Fraction of swarmalators whose unwrapped angle sweeps a full turn within
/// the post-transient window.
struct RotationSummary {
    double frac_x = 0.0;
    double frac_theta = 0.0;
};

namespace detail {

inline double rotating_fraction(const std::vector<std::vector<double>>& unwrapped,
                                std::size_t start, std::size_t end, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = unwrapped[start][i], hi = lo;
        for (std::size_t s = start + 1; s < end; ++s) {
            const double v = unwrapped[s][i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo >= two_pi) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

} // namespace detail

/// Drop the leading transient_fraction of samples, then flag swarmalator i
/// as rotating in x (resp. theta) when the range of its unwrapped angle over
/// the remaining window reaches 2*pi. The range criterion counts
/// back-and-forth full loops as rotations, which net displacement would miss.
inline RotationSummary rotation_fractions(const Trajectory& traj, const IntegrationConfig& cfg) {
    const std::size_t m = traj.samples();
    const std::size_t start = transient_end(m, cfg.transient_fraction);
    if (start >= m)
        throw InsufficientData("rotation_fractions: post-transient window is empty");
    const std::size_t n = traj.population();
    RotationSummary rs;
    rs.frac_x = detail::rotating_fraction(traj.x_unwrapped, start, m, n);
    rs.frac_theta = detail::rotating_fraction(traj.theta_unwrapped, start, m, n);
    return rs;
}

// ---------------------------------------------------------------------------
// Series and summaries
// ---------------------------------------------------------------------------

struct ObservableSeries {
    std::vector<double> t;
    std::vector<double> s_plus, s_minus, s_max, s_min, v_inst;
    // trailing-window means
    double mean_s_max = 0.0;
    double mean_s_min = 0.0;
    double mean_v = 0.0;          // raw |dx|
    double mean_v_comoving = 0.0; // |dx - nu|
};

inline ObservableSeries observable_series(const Trajectory& traj, const ModelParams& params,
                                          const IntegrationConfig& cfg) {
    const std::size_t m = traj.samples();
    ObservableSeries out;
    out.t = traj.times;
    out.s_plus.resize(m);
    out.s_minus.resize(m);
    out.s_max.resize(m);
    out.s_min.resize(m);
    out.v_inst.resize(m);
    std::vector<double> v_comoving(m);
    for (std::size_t s = 0; s < m; ++s) {
        const OrderParams op = order_params(traj.states[s]);
        out.s_plus[s] = op.s_plus;
        out.s_minus[s] = op.s_minus;
        out.s_max[s] = op.s_max;
        out.s_min[s] = op.s_min;
        const Rates r = rhs_meanfield(traj.states[s], params);
        double raw = 0.0, com = 0.0;
        for (double v : r.dx) {
            raw += std::abs(v);
            com += std::abs(v - params.nu);
        }
        out.v_inst[s] = raw / static_cast<double>(params.n);
        v_comoving[s] = com / static_cast<double>(params.n);
    }
    const std::size_t start = averaging_start(m, cfg.average_fraction);
    const auto w = static_cast<double>(m - start);
    for (std::size_t s = start; s < m; ++s) {
        out.mean_s_max += out.s_max[s];
        out.mean_s_min += out.s_min[s];
        out.mean_v += out.v_inst[s];
        out.mean_v_comoving += v_comoving[s];
    }
    out.mean_s_max /= w;
    out.mean_s_min /= w;
    out.mean_v /= w;
    out.mean_v_comoving /= w;
    return out;
}

/// The five summary statistics the state classifier consumes.
struct TrailingStats {
    double s_max = 0.0;
    double s_min = 0.0;
    double v = 0.0;
    double frac_x = 0.0;
    double frac_theta = 0.0;
};

inline TrailingStats summarize(const Trajectory& traj, const ModelParams& params,
                               const IntegrationConfig& cfg) {
    const ObservableSeries series = observable_series(traj, params, cfg);
    const RotationSummary rot = rotation_fractions(traj, cfg);
    return TrailingStats{series.mean_s_max, series.mean_s_min, series.mean_v,
                         rot.frac_x, rot.frac_theta};
}

} // namespace ringswarm

#endif
