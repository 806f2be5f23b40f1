#ifndef RINGSWARM_MODEL_HPP
#define RINGSWARM_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ringswarm/angles.hpp"
#include "ringswarm/errors.hpp"
#include "ringswarm/rng.hpp"

namespace ringswarm {

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Positions and phases of N swarmalators on the ring, wrapped to [0, 2*pi),
/// plus the model time.
struct SwarmState {
    std::vector<double> x;
    std::vector<double> theta;
    double t = 0.0;

    SwarmState() = default;

    SwarmState(std::vector<double> x_in, std::vector<double> theta_in, double t_in = 0.0)
        : x(std::move(x_in)), theta(std::move(theta_in)), t(t_in) {
        if (x.size() != theta.size())
            throw DimensionMismatch("SwarmState: x and theta lengths differ");
        if (x.size() < 2)
            throw DimensionMismatch("SwarmState: need at least 2 swarmalators");
        for (auto& a : x) a = wrap_angle(a);
        for (auto& a : theta) a = wrap_angle(a);
    }

    std::size_t size() const { return x.size(); }
};

// ---------------------------------------------------------------------------
// Coupling distributions
// ---------------------------------------------------------------------------

/// Two-point coupling distribution: a fraction p of the population gets k_p
/// (conformists, placed first in the coupling vector), the rest k_n.
struct DoubleDelta {
    double p;
    double k_p;
    double k_n;
};

struct SingleGaussian {
    double mu;
    double sigma;
};

/// Two-component normal mixture: weight p on mean k_p, weight 1-p on mean
/// k_n, shared sigma. Draws are i.i.d. from the mixture.
struct MixedGaussian {
    double p;
    double k_p;
    double k_n;
    double sigma;
};

using CouplingDistribution = std::variant<DoubleDelta, SingleGaussian, MixedGaussian>;

inline void validate(const CouplingDistribution& dist) {
    std::visit([](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DoubleDelta>) {
            if (!(d.p >= 0.0 && d.p <= 1.0))
                throw InvalidDistribution("double-delta: p must lie in [0, 1]");
        } else if constexpr (std::is_same_v<T, SingleGaussian>) {
            if (!(d.sigma > 0.0))
                throw InvalidDistribution("gaussian: sigma must be positive");
        } else {
            if (!(d.sigma > 0.0))
                throw InvalidDistribution("mixed-gaussian: sigma must be positive");
            if (!(d.p >= 0.0 && d.p <= 1.0))
                throw InvalidDistribution("mixed-gaussian: p must lie in [0, 1]");
        }
    }, dist);
}

inline const char* distribution_name(const CouplingDistribution& dist) {
    switch (dist.index()) {
        case 0: return "double-delta";
        case 1: return "gaussian";
        default: return "mixed-gaussian";
    }
}

/// Population mean of the coupling distribution.
inline double mean_coupling(const CouplingDistribution& dist) {
    return std::visit([](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SingleGaussian>) return d.mu;
        else return d.p * d.k_p + (1.0 - d.p) * d.k_n;
    }, dist);
}

/// Number of conformists (k_p entries) for a population of n: ceil(p*n).
inline std::size_t conformist_count(double p, std::size_t n) {
    auto c = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-12));
    return c > n ? n : c;
}

/// Draw the per-swarmalator coupling vector. Deterministic for fixed
/// (dist, n, seed). Double-delta uses deterministic counts, conformists
/// first; Gaussian variants draw i.i.d.
inline std::vector<double> sample_couplings(const CouplingDistribution& dist,
                                            std::size_t n, std::uint64_t seed) {
    if (n < 2) throw DimensionMismatch("sample_couplings: n must be >= 2");
    validate(dist);
    std::vector<double> k(n);
    if (const auto* dd = std::get_if<DoubleDelta>(&dist)) {
        const std::size_t n_p = conformist_count(dd->p, n);
        for (std::size_t i = 0; i < n; ++i) k[i] = (i < n_p) ? dd->k_p : dd->k_n;
    } else if (const auto* g = std::get_if<SingleGaussian>(&dist)) {
        Rng rng(seed);
        for (auto& v : k) v = rng.gaussian(g->mu, g->sigma);
    } else {
        const auto& m = std::get<MixedGaussian>(dist);
        Rng rng(seed);
        for (auto& v : k) {
            const double mu = (rng.uniform() < m.p) ? m.k_p : m.k_n;
            v = rng.gaussian(mu, m.sigma);
        }
    }
    return k;
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

/// Full parameter set: uniform position coupling j, natural frequencies
/// nu/omega (zero by default, i.e. the co-rotating frame), and the coupling
/// vector k drawn from `distribution` with `seed`.
struct ModelParams {
    std::size_t n = 0;
    double j = 1.0;
    double nu = 0.0;
    double omega = 0.0;
    std::vector<double> k;
    CouplingDistribution distribution = DoubleDelta{1.0, 1.0, -1.0};
    std::uint64_t seed = 0;

    /// Conformist count for double-delta parameters.
    std::size_t n_p() const {
        const auto* dd = std::get_if<DoubleDelta>(&distribution);
        if (!dd) throw UnsupportedDistribution("n_p is defined for double-delta couplings only");
        return conformist_count(dd->p, n);
    }
};

inline ModelParams make_params(std::size_t n, const CouplingDistribution& dist,
                               std::uint64_t seed, double j = 1.0,
                               double nu = 0.0, double omega = 0.0) {
    ModelParams p;
    p.n = n;
    p.j = j;
    p.nu = nu;
    p.omega = omega;
    p.distribution = dist;
    p.seed = seed;
    p.k = sample_couplings(dist, n, seed);
    return p;
}

inline void check_dimensions(const SwarmState& state, const ModelParams& params) {
    if (state.size() != params.n || params.k.size() != params.n)
        throw DimensionMismatch("state/params dimension mismatch");
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

struct Rates {
    std::vector<double> dx;
    std::vector<double> dtheta;
};

/// Pairwise O(N^2) evaluation of the equations of motion:
///   dx_i     = nu    + (j/N)   sum_j sin(x_j - x_i) cos(theta_j - theta_i)
///   dtheta_i = omega + (k_i/N) sum_j sin(theta_j - theta_i) cos(x_j - x_i)
/// The j == i term is identically zero and is left in the sum.
inline Rates rhs_direct(const SwarmState& state, const ModelParams& params) {
    check_dimensions(state, params);
    const std::size_t n = state.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    Rates r{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double sum_x = 0.0, sum_theta = 0.0;
        const double xi = state.x[i], ti = state.theta[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double dxij = state.x[j] - xi;
            const double dtij = state.theta[j] - ti;
            sum_x += std::sin(dxij) * std::cos(dtij);
            sum_theta += std::sin(dtij) * std::cos(dxij);
        }
        r.dx[i] = params.nu + params.j * inv_n * sum_x;
        r.dtheta[i] = params.omega + params.k[i] * inv_n * sum_theta;
    }
    return r;
}

/// Rainbow order parameter sums used by the O(N) path: W+ over xi = x+theta
/// and W- over eta = x-theta, plus the per-swarmalator sin/cos caches.
struct MeanFieldTerms {
    double wp_re = 0.0, wp_im = 0.0; // W+ * N
    double wm_re = 0.0, wm_im = 0.0; // W- * N
    std::vector<double> sin_xi, cos_xi, sin_eta, cos_eta;
};

inline MeanFieldTerms mean_field_terms(const std::vector<double>& x,
                                       const std::vector<double>& theta) {
    const std::size_t n = x.size();
    MeanFieldTerms mf;
    mf.sin_xi.resize(n);
    mf.cos_xi.resize(n);
    mf.sin_eta.resize(n);
    mf.cos_eta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i] + theta[i];
        const double eta = x[i] - theta[i];
        const double sxi = std::sin(xi), cxi = std::cos(xi);
        const double set = std::sin(eta), cet = std::cos(eta);
        mf.sin_xi[i] = sxi;
        mf.cos_xi[i] = cxi;
        mf.sin_eta[i] = set;
        mf.cos_eta[i] = cet;
        mf.wp_re += cxi;
        mf.wp_im += sxi;
        mf.wm_re += cet;
        mf.wm_im += set;
    }
    return mf;
}

/// O(N) mean-field evaluation, exactly equal to rhs_direct (product-to-sum
/// identity, not an approximation):
///   dx_i     = nu    + (j/2)  [S+ sin(phi+ - xi_i) + S- sin(phi- - eta_i)]
///   dtheta_i = omega + (k_i/2)[S+ sin(phi+ - xi_i) - S- sin(phi- - eta_i)]
/// with W+- = S+- e^{i phi+-} the complex means of e^{i(x +- theta)}.
inline Rates rhs_meanfield(const SwarmState& state, const ModelParams& params) {
    check_dimensions(state, params);
    const std::size_t n = state.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const MeanFieldTerms mf = mean_field_terms(state.x, state.theta);
    // S+- sin(phi+- - a) = Im(W+-) cos(a) - Re(W+-) sin(a)
    const double pr = mf.wp_re * inv_n, pim = mf.wp_im * inv_n;
    const double mr = mf.wm_re * inv_n, mim = mf.wm_im * inv_n;
    Rates r{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double plus = pim * mf.cos_xi[i] - pr * mf.sin_xi[i];
        const double minus = mim * mf.cos_eta[i] - mr * mf.sin_eta[i];
        r.dx[i] = params.nu + 0.5 * params.j * (plus + minus);
        r.dtheta[i] = params.omega + 0.5 * params.k[i] * (plus - minus);
    }
    return r;
}

// ---------------------------------------------------------------------------
// (xi, eta) coordinates
// ---------------------------------------------------------------------------

/// xi = x + theta, eta = x - theta, wrapped to [0, 2*pi).
inline std::pair<std::vector<double>, std::vector<double>> to_xi_eta(const SwarmState& state) {
    const std::size_t n = state.size();
    std::vector<double> xi(n), eta(n);
    for (std::size_t i = 0; i < n; ++i) {
        xi[i] = wrap_angle(state.x[i] + state.theta[i]);
        eta[i] = wrap_angle(state.x[i] - state.theta[i]);
    }
    return {std::move(xi), std::move(eta)};
}

/// Inverse transform x = (xi+eta)/2, theta = (xi-eta)/2 (up to wrapping).
inline SwarmState from_xi_eta(const std::vector<double>& xi, const std::vector<double>& eta,
                              double t = 0.0) {
    if (xi.size() != eta.size())
        throw DimensionMismatch("from_xi_eta: xi and eta lengths differ");
    const std::size_t n = xi.size();
    std::vector<double> x(n), theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 0.5 * (xi[i] + eta[i]);
        theta[i] = 0.5 * (xi[i] - eta[i]);
    }
    return SwarmState(std::move(x), std::move(theta), t);
}

/// Equations of motion in (xi, eta) coordinates:
///   dxi_i  = (nu+omega) + (1/2N) sum_j [(j+k_i) sin(xi_j-xi_i) + (j-k_i) sin(eta_j-eta_i)]
///   deta_i = (nu-omega) + (1/2N) sum_j [(j-k_i) sin(xi_j-xi_i) + (j+k_i) sin(eta_j-eta_i)]
/// Used by the stability module as the linearization target.
inline std::pair<std::vector<double>, std::vector<double>>
rhs_xi_eta(const std::vector<double>& xi, const std::vector<double>& eta,
           const ModelParams& params) {
    if (xi.size() != eta.size() || xi.size() != params.n)
        throw DimensionMismatch("rhs_xi_eta: dimension mismatch");
    const std::size_t n = xi.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double sp_re = 0.0, sp_im = 0.0, sm_re = 0.0, sm_im = 0.0;
    std::vector<double> sxi(n), cxi(n), set(n), cet(n);
    for (std::size_t i = 0; i < n; ++i) {
        sxi[i] = std::sin(xi[i]);
        cxi[i] = std::cos(xi[i]);
        set[i] = std::sin(eta[i]);
        cet[i] = std::cos(eta[i]);
        sp_re += cxi[i];
        sp_im += sxi[i];
        sm_re += cet[i];
        sm_im += set[i];
    }
    sp_re *= inv_n; sp_im *= inv_n; sm_re *= inv_n; sm_im *= inv_n;
    std::vector<double> dxi(n), deta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double plus = sp_im * cxi[i] - sp_re * sxi[i];  // (1/N) sum sin(xi_j - xi_i)
        const double minus = sm_im * cet[i] - sm_re * set[i]; // (1/N) sum sin(eta_j - eta_i)
        const double jp = 0.5 * (params.j + params.k[i]);
        const double jm = 0.5 * (params.j - params.k[i]);
        dxi[i] = (params.nu + params.omega) + jp * plus + jm * minus;
        deta[i] = (params.nu - params.omega) + jm * plus + jp * minus;
    }
    return {std::move(dxi), std::move(deta)};
}

} // namespace ringswarm

#endif
