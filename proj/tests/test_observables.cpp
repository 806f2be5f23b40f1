#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ringswarm/integrator.hpp"
#include "ringswarm/model.hpp"
#include "ringswarm/observables.hpp"

using namespace ringswarm;

namespace {

SwarmState random_state(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n), theta(n);
    for (auto& v : x) v = rng.angle();
    for (auto& v : theta) v = rng.angle();
    return SwarmState(std::move(x), std::move(theta));
}

/// Hand-built trajectory with a prescribed unwrapped drift per swarmalator.
Trajectory synthetic_trajectory(std::size_t n, std::size_t samples, double dt,
                                const std::vector<double>& x_rate,
                                const std::vector<double>& theta_rate) {
    Trajectory traj;
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) * dt;
        std::vector<double> xu(n), tu(n), xw(n), tw(n);
        for (std::size_t i = 0; i < n; ++i) {
            xu[i] = x_rate[i] * t;
            tu[i] = theta_rate[i] * t;
            xw[i] = wrap_angle(xu[i]);
            tw[i] = wrap_angle(tu[i]);
        }
        traj.times.push_back(t);
        traj.states.emplace_back(std::move(xw), std::move(tw), t);
        traj.x_unwrapped.push_back(std::move(xu));
        traj.theta_unwrapped.push_back(std::move(tu));
    }
    return traj;
}

} // namespace

TEST_CASE("order parameters at canonical configurations", "[observables]") {
    // everything at one point: both magnitudes maximal
    const SwarmState sync(std::vector<double>(8, 1.1), std::vector<double>(8, 2.2));
    const OrderParams a = order_params(sync);
    CHECK(a.s_plus == Catch::Approx(1.0));
    CHECK(a.s_minus == Catch::Approx(1.0));

    // phase wave x = theta + C on a fine grid: S- = 1, S+ = 0
    const std::size_t n = 64;
    std::vector<double> theta(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        theta[i] = two_pi * static_cast<double>(i) / static_cast<double>(n);
        x[i] = wrap_angle(theta[i] + 0.7);
    }
    const OrderParams b = order_params(SwarmState(std::move(x), std::move(theta)));
    CHECK(b.s_minus == Catch::Approx(1.0));
    CHECK(b.s_plus <= 1e-10);
    CHECK(b.s_max == Catch::Approx(1.0));
    CHECK(b.s_min <= 1e-10);

    // uniform product grid: both vanish
    const std::size_t m = 20;
    std::vector<double> gx, gt;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            gx.push_back(two_pi * static_cast<double>(i) / static_cast<double>(m));
            gt.push_back(two_pi * static_cast<double>(j) / static_cast<double>(m));
        }
    const OrderParams c = order_params(SwarmState(std::move(gx), std::move(gt)));
    CHECK(c.s_plus <= 1e-10);
    CHECK(c.s_minus <= 1e-10);
}

TEST_CASE("order parameter symmetries and bounds", "[observables]") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const SwarmState s = random_state(50, static_cast<std::uint64_t>(trial));
        const OrderParams op = order_params(s);
        REQUIRE(op.s_min >= 0.0);
        REQUIRE(op.s_min <= op.s_max);
        REQUIRE(op.s_max <= 1.0);

        // rigid shift leaves magnitudes alone, moves phases by c +- d
        const double c = rng.angle(), d = rng.angle();
        std::vector<double> xs = s.x, ts = s.theta;
        for (auto& v : xs) v += c;
        for (auto& v : ts) v += d;
        const OrderParams shifted = order_params(SwarmState(std::move(xs), std::move(ts)));
        REQUIRE(shifted.s_plus == Catch::Approx(op.s_plus).margin(1e-12));
        REQUIRE(shifted.s_minus == Catch::Approx(op.s_minus).margin(1e-12));

        // negating phases swaps the two magnitudes
        std::vector<double> xn = s.x, tn = s.theta;
        for (auto& v : tn) v = -v;
        const OrderParams swapped = order_params(SwarmState(std::move(xn), std::move(tn)));
        REQUIRE(swapped.s_plus == Catch::Approx(op.s_minus).margin(1e-12));
        REQUIRE(swapped.s_minus == Catch::Approx(op.s_plus).margin(1e-12));
        REQUIRE(swapped.s_max == Catch::Approx(op.s_max).margin(1e-12));
    }
}

TEST_CASE("mean velocity vanishes on static trajectories", "[observables]") {
    const ModelParams p = make_params(16, DoubleDelta{1.0, 0.5, -0.5}, 0);
    const IntegrationConfig cfg{0.1, 40.0, 1, 0.3, 0.1};
    const Trajectory traj =
        integrate(SwarmState(std::vector<double>(16, 0.4), std::vector<double>(16, 1.0)), p, cfg);
    CHECK(mean_velocity(traj, p, cfg) <= 1e-6);

    // two-swarmalator antipodal configuration
    const ModelParams p2 = make_params(2, DoubleDelta{1.0, 0.5, 0.5}, 0);
    const Trajectory t2 = integrate(SwarmState({0.0, pi}, {0.0, pi}), p2, cfg);
    CHECK(mean_velocity(t2, p2, cfg) <= 1e-15);
}

TEST_CASE("mean velocity needs at least two samples in the window", "[observables]") {
    const ModelParams p = make_params(4, DoubleDelta{1.0, 0.5, 0.5}, 0);
    const IntegrationConfig cfg{0.1, 0.5, 1, 0.3, 0.1}; // 6 samples, window = 1
    const Trajectory traj = integrate(init_random(p, 0), p, cfg);
    CHECK_THROWS_AS(mean_velocity(traj, p, cfg), InsufficientData);
}

TEST_CASE("rotation fractions detect full turns after the transient", "[observables]") {
    const std::size_t n = 4;
    // two rotors in x (one of them retrograde), one rotor in theta
    const std::vector<double> x_rate = {1.0, -1.2, 0.0, 0.0};
    const std::vector<double> t_rate = {0.0, 0.0, 0.9, 0.0};
    const Trajectory traj = synthetic_trajectory(n, 101, 0.2, x_rate, t_rate);
    const IntegrationConfig cfg{0.2, 20.0, 1, 0.3, 0.1};
    const RotationSummary rs = rotation_fractions(traj, cfg);
    // post-transient window is 14 time units: |rate| >= 2pi/14 = 0.449 rotates
    CHECK(rs.frac_x == Catch::Approx(0.5));
    CHECK(rs.frac_theta == Catch::Approx(0.25));

    const Trajectory still = synthetic_trajectory(n, 101, 0.2, {0, 0, 0, 0}, {0, 0, 0, 0});
    const RotationSummary none = rotation_fractions(still, cfg);
    CHECK(none.frac_x == 0.0);
    CHECK(none.frac_theta == 0.0);

    Trajectory empty;
    CHECK_THROWS_AS(rotation_fractions(empty, cfg), InsufficientData);
}

TEST_CASE("observable series summarizes the trailing window", "[observables]") {
    const ModelParams p = make_params(32, DoubleDelta{1.0, 0.5, -0.5}, 0);
    const IntegrationConfig cfg{0.1, 30.0, 1, 0.3, 0.1};
    const Trajectory traj =
        integrate(SwarmState(std::vector<double>(32, 0.0), std::vector<double>(32, 0.0)), p, cfg);
    const ObservableSeries series = observable_series(traj, p, cfg);
    REQUIRE(series.t.size() == traj.samples());
    CHECK(series.mean_s_max == Catch::Approx(1.0));
    CHECK(series.mean_s_min == Catch::Approx(1.0));
    CHECK(series.mean_v <= 1e-9);
    CHECK(series.mean_v_comoving == series.mean_v); // nu = 0
    for (double v : series.v_inst) REQUIRE(v >= 0.0);

    const TrailingStats stats = summarize(traj, p, cfg);
    CHECK(stats.s_max == series.mean_s_max);
    CHECK(stats.frac_x == 0.0);
}
