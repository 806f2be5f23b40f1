#ifndef RINGSWARM_STABILITY_HPP
#define RINGSWARM_STABILITY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ringswarm/errors.hpp"
#include "ringswarm/model.hpp"

namespace ringswarm {

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

enum class SpectrumSource { analytic, numeric };

struct SpectrumEntry {
    std::complex<double> lambda;
    std::size_t multiplicity = 1;
};

struct EigenSpectrum {
    std::vector<SpectrumEntry> entries;
    SpectrumSource source = SpectrumSource::analytic;

    std::size_t total_multiplicity() const {
        std::size_t m = 0;
        for (const auto& e : entries) m += e.multiplicity;
        return m;
    }

    /// Eigenvalues repeated by multiplicity, sorted by (re, im).
    std::vector<std::complex<double>> expanded() const {
        std::vector<std::complex<double>> out;
        out.reserve(total_multiplicity());
        for (const auto& e : entries)
            out.insert(out.end(), e.multiplicity, e.lambda);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        return out;
    }
};

/// Largest pairwise gap between two spectra compared as multisets, via
/// greedy nearest-neighbour matching. Greedy is exact whenever the
/// eigenvalue clusters are separated by more than their internal spread,
/// and avoids the mis-pairings a lexicographic sort produces when distinct
/// eigenvalues share a real part up to numerical jitter.
inline double max_spectrum_mismatch(const EigenSpectrum& a, const EigenSpectrum& b) {
    const auto ea = a.expanded();
    auto eb = b.expanded();
    if (ea.size() != eb.size())
        throw DimensionMismatch("max_spectrum_mismatch: spectra have different sizes");
    std::vector<bool> used(eb.size(), false);
    double worst = 0.0;
    for (const auto& v : ea) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < eb.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(v - eb[i]);
            if (d < best) {
                best = d;
                best_idx = i;
            }
        }
        used[best_idx] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

/// Total multiplicity of eigenvalues within tol of a reference value.
inline std::size_t multiplicity_near(const EigenSpectrum& spec, std::complex<double> value,
                                     double tol = 1e-6) {
    std::size_t m = 0;
    for (const auto& e : spec.entries)
        if (std::abs(e.lambda - value) <= tol) m += e.multiplicity;
    return m;
}

// ---------------------------------------------------------------------------
// Fixed-point configurations
// ---------------------------------------------------------------------------

enum class FixedPointKind { polarized, sync };

namespace detail {

/// Assign group members alternately to two offsets (even split, remainder to
/// the first offset).
inline void place_group(std::vector<double>& x, std::vector<double>& theta,
                        std::size_t begin, std::size_t end,
                        double offset_a, double offset_b) {
    for (std::size_t i = begin; i < end; ++i) {
        const double off = ((i - begin) % 2 == 0) ? offset_a : offset_b;
        x[i] = off;
        theta[i] = off;
    }
}

} // namespace detail

/// Four-clump polarized configuration: conformists split between (0, 0) and
/// (pi, pi), contrarians between (pi/2, pi/2) and (3pi/2, 3pi/2). The gauge
/// is fixed at x* = theta* = 0. Exact fixed point of the dynamics for
/// nu = omega = 0, for any clump split.
inline SwarmState polarized_fixed_point(const ModelParams& params) {
    const auto* dd = std::get_if<DoubleDelta>(&params.distribution);
    if (!dd)
        throw UnsupportedDistribution("polarized_fixed_point needs double-delta couplings");
    const std::size_t n_p = params.n_p();
    std::vector<double> x(params.n), theta(params.n);
    detail::place_group(x, theta, 0, n_p, 0.0, pi);
    detail::place_group(x, theta, n_p, params.n, 0.5 * pi, 1.5 * pi);
    return SwarmState(std::move(x), std::move(theta), 0.0);
}

/// Two-clump sync configuration: each coupling group split evenly between
/// (0, 0) and (pi, pi), remainder to the first clump.
inline SwarmState sync_fixed_point(const ModelParams& params) {
    std::vector<double> x(params.n), theta(params.n);
    if (std::holds_alternative<DoubleDelta>(params.distribution)) {
        const std::size_t n_p = params.n_p();
        detail::place_group(x, theta, 0, n_p, 0.0, pi);
        detail::place_group(x, theta, n_p, params.n, 0.0, pi);
    } else {
        detail::place_group(x, theta, 0, params.n, 0.0, pi);
    }
    return SwarmState(std::move(x), std::move(theta), 0.0);
}

inline SwarmState fixed_point(const ModelParams& params, FixedPointKind kind) {
    return kind == FixedPointKind::polarized ? polarized_fixed_point(params)
                                             : sync_fixed_point(params);
}

// ---------------------------------------------------------------------------
// Closed-form spectra
// ---------------------------------------------------------------------------

/// Closed-form spectrum at the polarized fixed point. Population fractions
/// enter as n_p/N (the finite-size counts), which is what the Jacobian
/// actually contains; the quadratic branches are enumerated explicitly so
/// the multiplicities sum to 2N.
inline EigenSpectrum polarized_eigenvalues(double j, double k_p, double k_n,
                                           double p, std::size_t n) {
    if (n < 4) throw DimensionMismatch("polarized_eigenvalues: need N >= 4");
    const std::size_t n_p = conformist_count(p, n);
    const std::size_t n_q = n - n_p;
    if (n_p == 0 || n_q == 0)
        throw DegeneratePopulation(
            "polarized_eigenvalues: both populations must be non-empty (0 < p < 1)");
    const double pe = static_cast<double>(n_p) / static_cast<double>(n);
    const double qe = 1.0 - pe;

    using cd = std::complex<double>;
    // saddle-node pair: the four population-uniform modes split into two
    // zero modes and +-sqrt(J(q K_p + p K_n))
    const cd root1 = std::sqrt(cd(j * (qe * k_p + pe * k_n), 0.0));
    auto quad = [](double frac, double coupling, double jj) {
        const double tr = -frac * (jj + coupling);
        const cd disc = std::sqrt(cd(frac * frac * (jj + coupling) * (jj + coupling) -
                                         8.0 * jj * coupling * frac + 4.0 * jj * coupling,
                                     0.0));
        return std::pair<cd, cd>{0.5 * (tr + disc), 0.5 * (tr - disc)};
    };
    const auto [conf_plus, conf_minus] = quad(pe, k_p, j);
    const auto [contra_plus, contra_minus] = quad(qe, k_n, j);

    EigenSpectrum spec;
    spec.source = SpectrumSource::analytic;
    spec.entries.push_back({cd(0.0, 0.0), 2});
    spec.entries.push_back({root1, 1});
    spec.entries.push_back({-root1, 1});
    if (n_p > 1) {
        spec.entries.push_back({conf_plus, n_p - 1});
        spec.entries.push_back({conf_minus, n_p - 1});
    }
    if (n_q > 1) {
        spec.entries.push_back({contra_plus, n_q - 1});
        spec.entries.push_back({contra_minus, n_q - 1});
    }
    return spec;
}

/// Closed-form spectrum at the sync fixed point. For a single population
/// (n_p = 0 or N) the mixed-coupling branches collapse.
inline EigenSpectrum sync_eigenvalues(double j, double k_p, double k_n,
                                      double p, std::size_t n) {
    if (n < 2) throw DimensionMismatch("sync_eigenvalues: need N >= 2");
    const std::size_t n_p = conformist_count(p, n);
    const std::size_t n_q = n - n_p;
    using cd = std::complex<double>;
    EigenSpectrum spec;
    spec.source = SpectrumSource::analytic;
    spec.entries.push_back({cd(0.0, 0.0), 2});
    spec.entries.push_back({cd(-j, 0.0), n - 1});
    if (n_p == 0) {
        spec.entries.push_back({cd(-k_n, 0.0), n - 1});
    } else if (n_q == 0) {
        spec.entries.push_back({cd(-k_p, 0.0), n - 1});
    } else {
        const double weighted =
            (k_p * static_cast<double>(n_q) + k_n * static_cast<double>(n_p)) /
            static_cast<double>(n);
        spec.entries.push_back({cd(-weighted, 0.0), 1});
        if (n_p > 1) spec.entries.push_back({cd(-k_p, 0.0), n_p - 1});
        if (n_q > 1) spec.entries.push_back({cd(-k_n, 0.0), n_q - 1});
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Stability verdicts
// ---------------------------------------------------------------------------

struct StabilityCondition {
    std::string name;
    bool satisfied = false;
    double margin = 0.0; // signed left-hand side of the condition
};

struct StabilityVerdict {
    bool stable = false;
    std::vector<StabilityCondition> conditions;
};

/// Polarized state is stable when J(qK_p + pK_n) < 0 (degenerate saddle
/// node), J + K_n > 0 (degenerate Hopf), and p >= 1/2.
inline StabilityVerdict polarized_stability(double j, double k_p, double k_n, double p) {
    const double q = 1.0 - p;
    const double saddle = j * (q * k_p + p * k_n);
    const double hopf = j + k_n;
    StabilityVerdict v;
    v.conditions.push_back({"saddle_node", saddle < 0.0, saddle});
    v.conditions.push_back({"hopf", hopf > 0.0, hopf});
    v.conditions.push_back({"population_fraction", p >= 0.5, p});
    v.stable = v.conditions[0].satisfied && v.conditions[1].satisfied && v.conditions[2].satisfied;
    return v;
}

/// Sync state is stable when J > 0 and every coupling branch decays; with
/// contrarians present that requires K_n > 0, so in practice p = 1.
inline StabilityVerdict sync_stability(double j, double k_p, double k_n, double p) {
    StabilityVerdict v;
    v.conditions.push_back({"position_coupling", j > 0.0, j});
    v.conditions.push_back({"conformist_coupling", k_p > 0.0, k_p});
    if (p < 1.0) v.conditions.push_back({"contrarian_coupling", k_n > 0.0, k_n});
    v.stable = std::all_of(v.conditions.begin(), v.conditions.end(),
                           [](const auto& c) { return c.satisfied; });
    return v;
}

/// Critical K_n of the polarized saddle-node boundary at fixed (p, K_p);
/// the root of q K_p + p K_n = 0, independent of J.
inline double kn_saddle(double p, double k_p) {
    if (!(p > 0.0)) throw DegeneratePopulation("kn_saddle: p must be positive");
    return -(1.0 - p) / p * k_p;
}

/// Critical K_n of the polarized Hopf boundary.
inline double kn_hopf(double j = 1.0) { return -j; }

// ---------------------------------------------------------------------------
// Incoherent (static async) threshold
// ---------------------------------------------------------------------------

/// The async state is stable when the mean coupling satisfies <K> < -<J>.
struct AsyncThreshold {
    enum class Kind { critical_fraction, critical_mean };
    Kind kind = Kind::critical_fraction;
    double value = 0.0;
};

inline AsyncThreshold async_threshold(const CouplingDistribution& dist, double j = 1.0) {
    validate(dist);
    if (std::holds_alternative<SingleGaussian>(dist))
        return {AsyncThreshold::Kind::critical_mean, -j};
    double k_p = 0.0, k_n = 0.0;
    if (const auto* dd = std::get_if<DoubleDelta>(&dist)) {
        k_p = dd->k_p;
        k_n = dd->k_n;
    } else {
        const auto& m = std::get<MixedGaussian>(dist);
        k_p = m.k_p;
        k_n = m.k_n;
    }
    if (k_n == k_p)
        throw UndefinedThreshold("async_threshold: mean coupling does not depend on p");
    return {AsyncThreshold::Kind::critical_fraction, (j + k_n) / (k_n - k_p)};
}

inline bool async_stable(const CouplingDistribution& dist, double j = 1.0) {
    return mean_coupling(dist) < -j;
}

// ---------------------------------------------------------------------------
// Jacobians
// ---------------------------------------------------------------------------

namespace detail {

/// All-plus interaction block: off-diagonal (j+c_i)/(2N), diagonal
/// -(N-1)(j+c_i)/(2N), where c_i is x for conformist rows and y otherwise.
inline void fill_block_uniform(Eigen::MatrixXd& m, Eigen::Index row0, Eigen::Index col0,
                               std::size_t n, std::size_t n_p, double j, double x, double y) {
    const double inv = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (i < n_p) ? (j + x) * inv : (j + y) * inv;
        for (std::size_t jj = 0; jj < n; ++jj)
            m(row0 + static_cast<Eigen::Index>(i), col0 + static_cast<Eigen::Index>(jj)) =
                (i == jj) ? -static_cast<double>(n - 1) * c : c;
    }
}

/// Population-signed interaction block: the polarized fixed point separates
/// the two populations by pi in xi, so cross-population couplings flip sign.
/// Off-diagonal +-(j+c_i)/(2N); diagonal (n_other - n_same + 1)(j+c_i)/(2N).
inline void fill_block_signed(Eigen::MatrixXd& m, Eigen::Index row0, Eigen::Index col0,
                              std::size_t n, std::size_t n_p, double j, double x, double y) {
    const double inv = 1.0 / (2.0 * static_cast<double>(n));
    const std::size_t n_q = n - n_p;
    for (std::size_t i = 0; i < n; ++i) {
        const bool i_conf = i < n_p;
        const double c = (i_conf ? (j + x) : (j + y)) * inv;
        const double diag =
            (i_conf ? (static_cast<double>(n_q) - static_cast<double>(n_p) + 1.0)
                    : (static_cast<double>(n_p) - static_cast<double>(n_q) + 1.0)) *
            c;
        for (std::size_t jj = 0; jj < n; ++jj) {
            const bool same = (jj < n_p) == i_conf;
            m(row0 + static_cast<Eigen::Index>(i), col0 + static_cast<Eigen::Index>(jj)) =
                (i == jj) ? diag : (same ? c : -c);
        }
    }
}

} // namespace detail

/// Closed-form Jacobian of the (xi, eta) dynamics at the chosen fixed point,
/// state ordered (xi_0..xi_{N-1}, eta_0..eta_{N-1}). Double-delta couplings
/// only. The off-diagonal (eta-derivative) blocks carry coefficients
/// (J - K_i)/(2N); the xi-derivative blocks pick up the population sign
/// structure at the polarized point and are uniform at the sync point.
inline Eigen::MatrixXd build_jacobian_analytic(const ModelParams& params, FixedPointKind kind) {
    const auto* dd = std::get_if<DoubleDelta>(&params.distribution);
    if (!dd)
        throw UnsupportedDistribution("build_jacobian_analytic needs double-delta couplings");
    const std::size_t n = params.n;
    const std::size_t n_p = params.n_p();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m(2 * ni, 2 * ni);
    const double j = params.j, kp = dd->k_p, kn = dd->k_n;
    if (kind == FixedPointKind::polarized) {
        detail::fill_block_signed(m, 0, 0, n, n_p, j, kp, kn);
        detail::fill_block_uniform(m, 0, ni, n, n_p, j, -kp, -kn);
        detail::fill_block_signed(m, ni, 0, n, n_p, j, -kp, -kn);
        detail::fill_block_uniform(m, ni, ni, n, n_p, j, kp, kn);
    } else {
        detail::fill_block_uniform(m, 0, 0, n, n_p, j, kp, kn);
        detail::fill_block_uniform(m, 0, ni, n, n_p, j, -kp, -kn);
        detail::fill_block_uniform(m, ni, 0, n, n_p, j, -kp, -kn);
        detail::fill_block_uniform(m, ni, ni, n, n_p, j, kp, kn);
    }
    return m;
}

/// Central finite-difference Jacobian of the (xi, eta) right-hand side.
inline Eigen::MatrixXd build_jacobian_fd_xi_eta(const ModelParams& params,
                                                const SwarmState& at, double h = 1e-6) {
    const std::size_t n = params.n;
    auto [xi, eta] = to_xi_eta(at);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m(2 * ni, 2 * ni);
    auto column = [&](std::vector<double>& coord, std::size_t idx, Eigen::Index col) {
        const double saved = coord[idx];
        coord[idx] = saved + h;
        auto [dxi_p, deta_p] = rhs_xi_eta(xi, eta, params);
        coord[idx] = saved - h;
        auto [dxi_m, deta_m] = rhs_xi_eta(xi, eta, params);
        coord[idx] = saved;
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t r = 0; r < n; ++r) {
            m(static_cast<Eigen::Index>(r), col) = (dxi_p[r] - dxi_m[r]) * inv;
            m(ni + static_cast<Eigen::Index>(r), col) = (deta_p[r] - deta_m[r]) * inv;
        }
    };
    for (std::size_t idx = 0; idx < n; ++idx) column(xi, idx, static_cast<Eigen::Index>(idx));
    for (std::size_t idx = 0; idx < n; ++idx) column(eta, idx, ni + static_cast<Eigen::Index>(idx));
    return m;
}

/// Central finite-difference Jacobian of the pairwise (x, theta) right-hand
/// side. Spectra of the (x, theta) and (xi, eta) Jacobians coincide (the
/// coordinate change is linear), so this is the fully independent check on
/// the closed forms: different coordinates, different evaluation path.
inline Eigen::MatrixXd build_jacobian_fd_xtheta(const ModelParams& params,
                                                const SwarmState& at, double h = 1e-6) {
    const std::size_t n = params.n;
    SwarmState s = at;
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m(2 * ni, 2 * ni);
    auto column = [&](std::vector<double>& coord, std::size_t idx, Eigen::Index col) {
        const double saved = coord[idx];
        coord[idx] = saved + h;
        const Rates rp = rhs_direct(s, params);
        coord[idx] = saved - h;
        const Rates rm = rhs_direct(s, params);
        coord[idx] = saved;
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t r = 0; r < n; ++r) {
            m(static_cast<Eigen::Index>(r), col) = (rp.dx[r] - rm.dx[r]) * inv;
            m(ni + static_cast<Eigen::Index>(r), col) = (rp.dtheta[r] - rm.dtheta[r]) * inv;
        }
    };
    for (std::size_t idx = 0; idx < n; ++idx) column(s.x, idx, static_cast<Eigen::Index>(idx));
    for (std::size_t idx = 0; idx < n; ++idx) column(s.theta, idx, ni + static_cast<Eigen::Index>(idx));
    return m;
}

/// Eigenvalues of the finite-difference Jacobian at the constructed fixed
/// point, merged into (value, multiplicity) entries within merge_tol.
inline EigenSpectrum numeric_jacobian_spectrum(const ModelParams& params, FixedPointKind kind,
                                               double merge_tol = 1e-7) {
    if (params.n > 400)
        throw ConfigError("numeric_jacobian_spectrum: dense eigensolve limited to N <= 400");
    const SwarmState at = fixed_point(params, kind);
    const Eigen::MatrixXd m = build_jacobian_fd_xtheta(params, at);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        const std::string dump = "jacobian_dump.txt";
        std::ofstream out(dump);
        out << m << "\n";
        throw NumericError("eigensolver failed to converge; matrix written to " + dump);
    }
    std::vector<std::complex<double>> vals(solver.eigenvalues().data(),
                                           solver.eigenvalues().data() + 2 * params.n);
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    EigenSpectrum spec;
    spec.source = SpectrumSource::numeric;
    for (const auto& v : vals) {
        if (!spec.entries.empty() && std::abs(v - spec.entries.back().lambda) <= merge_tol)
            ++spec.entries.back().multiplicity;
        else
            spec.entries.push_back({v, 1});
    }
    return spec;
}

/// Infinity norm of the right-hand side at a state; zero at a fixed point.
inline double rhs_residual(const SwarmState& state, const ModelParams& params) {
    const Rates r = rhs_direct(state, params);
    double worst = 0.0;
    for (double v : r.dx) worst = std::max(worst, std::abs(v));
    for (double v : r.dtheta) worst = std::max(worst, std::abs(v));
    return worst;
}

} // namespace ringswarm

#endif
