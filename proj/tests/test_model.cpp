#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ringswarm/model.hpp"

using namespace ringswarm;

namespace {

/// Independent oracle for the pairwise sums, written with complex
/// exponentials instead of the sin/cos products the implementation uses:
/// sin(a - b) cos(c - d) = Im(e^{i(a-b)}) * Re(e^{i(c-d)}).
Rates rhs_oracle(const SwarmState& s, const ModelParams& p) {
    const std::size_t n = s.size();
    Rates r{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> acc_x = 0.0, acc_t = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto ex = std::polar(1.0, s.x[j] - s.x[i]);
            const auto et = std::polar(1.0, s.theta[j] - s.theta[i]);
            acc_x += std::complex<double>(ex.imag() * et.real(), 0.0);
            acc_t += std::complex<double>(et.imag() * ex.real(), 0.0);
        }
        r.dx[i] = p.nu + p.j * acc_x.real() / static_cast<double>(n);
        r.dtheta[i] = p.omega + p.k[i] * acc_t.real() / static_cast<double>(n);
    }
    return r;
}

SwarmState random_state(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n), theta(n);
    for (auto& v : x) v = rng.angle();
    for (auto& v : theta) v = rng.angle();
    return SwarmState(std::move(x), std::move(theta));
}

} // namespace

TEST_CASE("double-delta couplings: deterministic counts, conformists first", "[model]") {
    CHECK(sample_couplings(DoubleDelta{1.0, 0.5, -0.5}, 4, 0) ==
          std::vector<double>{0.5, 0.5, 0.5, 0.5});
    CHECK(sample_couplings(DoubleDelta{0.25, 0.5, -3.0}, 4, 0) ==
          std::vector<double>{0.5, -3.0, -3.0, -3.0});

    const auto k = sample_couplings(DoubleDelta{0.8, 0.5, -0.5}, 500, 123);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] == 0.5) {
            ++n_pos;
            REQUIRE(i < 400);
        } else {
            REQUIRE(k[i] == -0.5);
        }
    }
    CHECK(n_pos == 400);
}

TEST_CASE("coupling sampling is bit-reproducible", "[model]") {
    for (const CouplingDistribution dist :
         {CouplingDistribution{DoubleDelta{0.6, 0.5, -0.5}},
          CouplingDistribution{SingleGaussian{-0.3, 0.5}},
          CouplingDistribution{MixedGaussian{0.4, 1.0, -2.0, 0.5}}}) {
        const auto a = sample_couplings(dist, 100, 42);
        const auto b = sample_couplings(dist, 100, 42);
        CHECK(a == b);
        const auto c = sample_couplings(dist, 100, 43);
        if (!std::holds_alternative<DoubleDelta>(dist)) CHECK(a != c);
    }
}

TEST_CASE("gaussian couplings have the requested moments", "[model]") {
    const std::size_t n = 20000;
    const auto k = sample_couplings(SingleGaussian{-0.5, 0.5}, n, 7);
    double mean = 0.0;
    for (double v : k) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - (-0.5)) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));

    const auto m = sample_couplings(MixedGaussian{0.3, 2.0, -2.0, 0.1}, n, 7);
    std::size_t near_pos = 0;
    for (double v : m)
        if (v > 0.0) ++near_pos;
    CHECK(std::abs(static_cast<double>(near_pos) / static_cast<double>(n) - 0.3) < 0.02);
}

TEST_CASE("invalid distributions are rejected", "[model]") {
    CHECK_THROWS_AS(sample_couplings(SingleGaussian{0.0, 0.0}, 10, 0), InvalidDistribution);
    CHECK_THROWS_AS(sample_couplings(SingleGaussian{0.0, -1.0}, 10, 0), InvalidDistribution);
    CHECK_THROWS_AS(sample_couplings(DoubleDelta{1.5, 0.5, -0.5}, 10, 0), InvalidDistribution);
    CHECK_THROWS_AS(sample_couplings(MixedGaussian{-0.1, 1.0, -1.0, 0.5}, 10, 0),
                    InvalidDistribution);
    CHECK_THROWS_AS(sample_couplings(DoubleDelta{0.5, 0.5, -0.5}, 1, 0), DimensionMismatch);
}

TEST_CASE("synchronized and antipodal configurations are fixed points", "[model]") {
    ModelParams p = make_params(2, DoubleDelta{1.0, 0.8, -0.3}, 0);
    const SwarmState sync({1.3, 1.3}, {0.4, 0.4});
    const Rates r1 = rhs_direct(sync, p);
    CHECK(r1.dx[0] == 0.0);
    CHECK(r1.dx[1] == 0.0);
    CHECK(r1.dtheta[0] == 0.0);
    CHECK(r1.dtheta[1] == 0.0);

    p = make_params(2, DoubleDelta{0.5, 2.4, -1.7}, 0, 3.1);
    const SwarmState antipodal({0.0, pi}, {0.0, pi});
    const Rates r2 = rhs_direct(antipodal, p);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(r2.dx[i]) < 1e-15);
        CHECK(std::abs(r2.dtheta[i]) < 1e-15);
    }
}

TEST_CASE("pairwise rates match an independently written oracle", "[model]") {
    // the three-swarmalator configuration with x = theta on a quarter grid
    ModelParams p3 = make_params(3, DoubleDelta{1.0, 0.5, -0.5}, 0);
    const SwarmState s3({0.0, 0.5 * pi, pi}, {0.0, 0.5 * pi, pi});
    const Rates got = rhs_direct(s3, p3);
    const Rates want = rhs_oracle(s3, p3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got.dx[i] == Catch::Approx(want.dx[i]).margin(1e-14));
        CHECK(got.dtheta[i] == Catch::Approx(want.dtheta[i]).margin(1e-14));
    }

    // random states, mixed couplings, nonzero drifts
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ModelParams p = make_params(40, MixedGaussian{0.5, 1.0, -1.5, 0.5}, seed,
                                          1.3, 0.2, -0.4);
        const SwarmState s = random_state(40, seed + 100);
        const Rates a = rhs_direct(s, p);
        const Rates b = rhs_oracle(s, p);
        for (std::size_t i = 0; i < 40; ++i) {
            REQUIRE(a.dx[i] == Catch::Approx(b.dx[i]).margin(1e-13));
            REQUIRE(a.dtheta[i] == Catch::Approx(b.dtheta[i]).margin(1e-13));
        }
    }
}

TEST_CASE("mean-field path is exactly the pairwise dynamics", "[model]") {
    // N = 2 corner
    const ModelParams p2 = make_params(2, DoubleDelta{0.5, 1.2, -0.6}, 1);
    const SwarmState s2 = random_state(2, 5);
    const Rates d2 = rhs_direct(s2, p2);
    const Rates m2 = rhs_meanfield(s2, p2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(m2.dx[i] == Catch::Approx(d2.dx[i]).margin(1e-12));
        CHECK(m2.dtheta[i] == Catch::Approx(d2.dtheta[i]).margin(1e-12));
    }

    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const ModelParams p = make_params(200, DoubleDelta{0.7, 0.5, -1.0}, seed);
        const SwarmState s = random_state(200, seed + 1000);
        const Rates d = rhs_direct(s, p);
        const Rates m = rhs_meanfield(s, p);
        for (std::size_t i = 0; i < 200; ++i) {
            worst = std::max(worst, std::abs(d.dx[i] - m.dx[i]));
            worst = std::max(worst, std::abs(d.dtheta[i] - m.dtheta[i]));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("rates depend only on angle differences", "[model]") {
    const ModelParams p = make_params(30, DoubleDelta{0.6, 0.5, -0.5}, 3);
    const SwarmState s = random_state(30, 9);
    const Rates base = rhs_meanfield(s, p);
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const double c = rng.angle(), d = rng.angle();
        std::vector<double> x = s.x, theta = s.theta;
        for (auto& v : x) v += c;
        for (auto& v : theta) v += d;
        const Rates shifted = rhs_meanfield(SwarmState(std::move(x), std::move(theta)), p);
        for (std::size_t i = 0; i < 30; ++i) {
            REQUIRE(shifted.dx[i] == Catch::Approx(base.dx[i]).margin(1e-12));
            REQUIRE(shifted.dtheta[i] == Catch::Approx(base.dtheta[i]).margin(1e-12));
        }
    }
}

TEST_CASE("momentum-like sums vanish", "[model]") {
    const std::size_t n = 100;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        // uniform J, nu = 0: sum of dx vanishes by antisymmetry
        const ModelParams p = make_params(n, SingleGaussian{-0.5, 1.0}, seed);
        const SwarmState s = random_state(n, seed + 50);
        const Rates r = rhs_direct(s, p);
        double sum_dx = 0.0;
        for (double v : r.dx) sum_dx += v;
        REQUIRE(std::abs(sum_dx) <= 1e-12 * static_cast<double>(n));

        // identical K, omega = 0: sum of dtheta vanishes the same way
        const ModelParams pk = make_params(n, DoubleDelta{1.0, 0.7, 0.0}, seed);
        const Rates rk = rhs_direct(s, pk);
        double sum_dt = 0.0;
        for (double v : rk.dtheta) sum_dt += v;
        REQUIRE(std::abs(sum_dt) <= 1e-12 * static_cast<double>(n));
    }
}

TEST_CASE("xi/eta transform round-trips", "[model]") {
    const SwarmState one({0.0, 0.5 * pi}, {0.0, 0.5 * pi});
    const auto [xi, eta] = to_xi_eta(one);
    CHECK(xi[0] == 0.0);
    CHECK(eta[0] == 0.0);
    CHECK(xi[1] == Catch::Approx(pi));
    CHECK(eta[1] == Catch::Approx(0.0).margin(1e-15));

    // wrapped (xi, eta) determine (x, theta) only up to a simultaneous
    // half turn per swarmalator; (x_i + pi, theta_i + pi) is a symmetry of
    // the dynamics (both trig factors flip sign), so either branch is the
    // same physical state
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SwarmState s = random_state(25, seed);
        const auto [xs, es] = to_xi_eta(s);
        const SwarmState back = from_xi_eta(xs, es);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double dx = angular_distance(back.x[i], s.x[i]);
            const double dt = angular_distance(back.theta[i], s.theta[i]);
            const bool same = dx < 1e-12 && dt < 1e-12;
            const bool half_turn = std::abs(dx - pi) < 1e-12 && std::abs(dt - pi) < 1e-12;
            REQUIRE((same || half_turn));
        }
    }
}

TEST_CASE("xi/eta rates are the sum and difference of x/theta rates", "[model]") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ModelParams p = make_params(60, DoubleDelta{0.3, 0.9, -1.1}, seed, 1.0, 0.1, -0.2);
        const SwarmState s = random_state(60, seed + 7);
        const Rates r = rhs_direct(s, p);
        std::vector<double> xi(60), eta(60);
        for (std::size_t i = 0; i < 60; ++i) {
            xi[i] = s.x[i] + s.theta[i]; // unwrapped on purpose; rhs is periodic
            eta[i] = s.x[i] - s.theta[i];
        }
        const auto [dxi, deta] = rhs_xi_eta(xi, eta, p);
        for (std::size_t i = 0; i < 60; ++i) {
            REQUIRE(dxi[i] == Catch::Approx(r.dx[i] + r.dtheta[i]).margin(1e-10));
            REQUIRE(deta[i] == Catch::Approx(r.dx[i] - r.dtheta[i]).margin(1e-10));
        }
    }
}

TEST_CASE("dimension mismatches are caught", "[model]") {
    const ModelParams p = make_params(4, DoubleDelta{0.5, 0.5, -0.5}, 0);
    const SwarmState s({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(rhs_direct(s, p), DimensionMismatch);
    CHECK_THROWS_AS(SwarmState({0.0, 1.0}, {0.0}), DimensionMismatch);
}
