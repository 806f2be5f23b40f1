#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ringswarm/sweep.hpp"

using namespace ringswarm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepConfig tiny_config(const std::string& outdir) {
    SweepConfig cfg;
    cfg.axes = {{"p", 0.2, 1.0, 0.4}, {"kn", -0.6, -0.2, 0.4}}; // 3 x 2 grid
    cfg.dist = DoubleDelta{0.8, 0.5, -0.5};
    cfg.n = 24;
    cfg.integration = {0.1, 20.0, 2, 0.3, 0.1};
    cfg.seeds = {1, 2};
    cfg.output_path = outdir;
    cfg.verbose = false;
    return cfg;
}

} // namespace

TEST_CASE("sweep results are worker-count invariant and resumable", "[sweep]") {
    const fs::path dir_a = "sweep_out_a", dir_b = "sweep_out_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    SweepConfig cfg_a = tiny_config(dir_a.string());
    cfg_a.workers = 1;
    const auto res_a = run_sweep(cfg_a);

    SweepConfig cfg_b = tiny_config(dir_b.string());
    cfg_b.workers = 4;
    const auto res_b = run_sweep(cfg_b);

    REQUIRE(res_a.size() == 6);
    REQUIRE(res_b.size() == 6);
    CHECK(slurp(dir_a / "cells.csv") == slurp(dir_b / "cells.csv"));
    CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
    CHECK(slurp(dir_a / "theory_curves.csv") == slurp(dir_b / "theory_curves.csv"));

    // simulate an interrupted sweep: drop two checkpoints and the aggregates
    const std::string cells_before = slurp(dir_a / "cells.csv");
    fs::remove(dir_a / "cells" / "cell_000002.json");
    fs::remove(dir_a / "cells" / "cell_000005.json");
    fs::remove(dir_a / "cells.csv");
    fs::remove(dir_a / "summary.csv");
    run_sweep(cfg_a);
    CHECK(slurp(dir_a / "cells.csv") == cells_before);

    // every cell appears exactly once in the summary
    const std::string summary = slurp(dir_a / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 7); // header + 6 cells

    // stale checkpoints from a different configuration are not reused
    SweepConfig cfg_c = tiny_config(dir_a.string());
    cfg_c.integration.t_end = 10.0;
    cfg_c.workers = 2;
    const auto res_c = run_sweep(cfg_c);
    REQUIRE(res_c.size() == 6);
    CHECK(slurp(dir_a / "cells.csv") != cells_before);

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("known cells land where the theory says", "[sweep]") {
    // p = 1 with positive K_p: static sync
    const RunOutcome sync = run_one(200, DoubleDelta{1.0, 0.5, -0.5}, 1.0, 0.0, 0.0,
                                    {0.1, 60.0, 1, 0.3, 0.1}, {}, 7);
    CHECK(sync.label == StateLabel::StaticSync);
    CHECK_FALSE(sync.diverged);

    // deterministic repetition, bit for bit
    const RunOutcome again = run_one(200, DoubleDelta{1.0, 0.5, -0.5}, 1.0, 0.0, 0.0,
                                     {0.1, 60.0, 1, 0.3, 0.1}, {}, 7);
    CHECK(sync.stats.s_max == again.stats.s_max);
    CHECK(sync.stats.v == again.stats.v);
}

TEST_CASE("theory overlay samples the three boundary curves", "[sweep]") {
    SweepConfig cfg = tiny_config("unused");
    cfg.axes = {{"p", 0.0, 1.0, 0.05}, {"kn", -2.0, 0.0, 0.1}};
    cfg.dist = DoubleDelta{0.8, 0.5, -2.0};
    const auto pts = overlay_theory(cfg);

    bool saw_saddle_mid = false, saw_async_04 = false, hopf_constant = true;
    for (const auto& pt : pts) {
        if (pt.curve == "saddle_node" && std::abs(pt.p - 0.5) < 1e-9)
            saw_saddle_mid = std::abs(pt.k_n - (-0.5)) < 1e-9;
        if (pt.curve == "async" && std::abs(pt.k_n - (-2.0)) < 1e-9)
            saw_async_04 = std::abs(pt.p - 0.4) < 1e-9;
        if (pt.curve == "hopf") hopf_constant = hopf_constant && pt.k_n == -1.0;
    }
    CHECK(saw_saddle_mid);
    CHECK(saw_async_04);
    CHECK(hopf_constant);

    // saddle curve flattens to zero as p -> 1
    double saddle_at_1 = 1.0;
    for (const auto& pt : pts)
        if (pt.curve == "saddle_node" && std::abs(pt.p - 1.0) < 1e-9) saddle_at_1 = pt.k_n;
    CHECK(std::abs(saddle_at_1) < 1e-12);

    CHECK_THROWS_AS(overlay_theory(SweepConfig{{{"mu", 0.0, 1.0, 0.1}},
                                               SingleGaussian{0.0, 0.5}}),
                    UnsupportedDistribution);
}

TEST_CASE("sweep config parsing names offending keys", "[sweep]") {
    const json good = {{"axes", json::array({{{"name", "p"}, {"start", 0.0}, {"stop", 1.0},
                                              {"step", 0.5}}})},
                       {"dist", "double-delta"},
                       {"kp", 0.5},
                       {"kn", -2.0},
                       {"n", 50},
                       {"output_path", "x"}};
    const SweepConfig cfg = sweep_config_from_json(good);
    CHECK(cfg.n == 50);
    CHECK(std::get<DoubleDelta>(cfg.dist).k_n == -2.0);

    json bad = good;
    bad["t_endd"] = 3.0;
    try {
        sweep_config_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("t_endd") != std::string::npos);
    }

    json wrong_type = good;
    wrong_type["t_end"] = "soon";
    try {
        sweep_config_from_json(wrong_type);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("t_end") != std::string::npos);
    }

    // missing axes
    json no_axes = good;
    no_axes.erase("axes");
    CHECK_THROWS_AS(sweep_config_from_json(no_axes), ConfigError);

    // empty axes list fails validation
    json empty_axes = good;
    empty_axes["axes"] = json::array();
    CHECK_THROWS_AS(run_sweep(sweep_config_from_json(empty_axes)), ConfigError);

    // axis that does not apply to the distribution
    SweepConfig mismatched;
    mismatched.axes = {{"mu", 0.0, 1.0, 0.1}};
    mismatched.dist = DoubleDelta{0.5, 0.5, -0.5};
    mismatched.output_path = "x";
    CHECK_THROWS_AS(validate(mismatched), ConfigError);
}

TEST_CASE("divergence flags survive the checkpoint round trip", "[sweep]") {
    SweepCellResult cell;
    cell.cell_index = 3;
    cell.dist = DoubleDelta{0.5, 0.5, -0.5};
    cell.j = 1.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.per_seed.push_back({0, 12345, StateLabel::Unclassified, {nan, nan, nan, nan, nan}, true});
    cell.per_seed.push_back({1, 777, StateLabel::Polarized, {0.97, 0.61, 1e-7, 0.0, 0.0}, false});
    cell.modal_label = detail::modal_label_of(cell.per_seed);

    const json j = detail::cell_to_json(cell, 99);
    SweepCellResult back;
    REQUIRE(detail::cell_from_json(j, 3, 2, 99, back));
    CHECK(back.per_seed[0].diverged);
    CHECK(back.per_seed[0].label == StateLabel::Unclassified);
    CHECK(std::isnan(back.per_seed[0].stats.s_max));
    CHECK_FALSE(back.per_seed[1].diverged);
    CHECK(back.per_seed[1].stats.s_min == 0.61);

    // wrong fingerprint or seed count rejects the checkpoint
    CHECK_FALSE(detail::cell_from_json(j, 3, 2, 100, back));
    CHECK_FALSE(detail::cell_from_json(j, 3, 3, 99, back));
    CHECK_FALSE(detail::cell_from_json(j, 4, 2, 99, back));
}
