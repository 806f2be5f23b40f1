#ifndef RINGSWARM_IO_HPP
#define RINGSWARM_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringswarm/classifier.hpp"
#include "ringswarm/errors.hpp"
#include "ringswarm/integrator.hpp"
#include "ringswarm/model.hpp"
#include "ringswarm/observables.hpp"
#include "ringswarm/stability.hpp"

namespace ringswarm {

using json = nlohmann::json;

/// 17 significant digits: round-trips any double exactly.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

/// Header: t,x_0..x_{N-1},theta_0..theta_{N-1}; wrapped angles.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = open_output(path);
    const std::size_t n = traj.population();
    out << "t";
    for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
    for (std::size_t i = 0; i < n; ++i) out << ",theta_" << i;
    out << "\n";
    for (std::size_t s = 0; s < traj.samples(); ++s) {
        out << fmt_g17(traj.times[s]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << fmt_g17(traj.states[s].x[i]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << fmt_g17(traj.states[s].theta[i]);
        out << "\n";
    }
}

/// Companion file with the unwrapped (real-line) angles, same layout.
inline void write_trajectory_unwrapped_csv(const std::filesystem::path& path,
                                           const Trajectory& traj) {
    auto out = open_output(path);
    const std::size_t n = traj.population();
    out << "t";
    for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
    for (std::size_t i = 0; i < n; ++i) out << ",theta_" << i;
    out << "\n";
    for (std::size_t s = 0; s < traj.samples(); ++s) {
        out << fmt_g17(traj.times[s]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << fmt_g17(traj.x_unwrapped[s][i]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << fmt_g17(traj.theta_unwrapped[s][i]);
        out << "\n";
    }
}

inline void write_observables_csv(const std::filesystem::path& path,
                                  const ObservableSeries& series) {
    auto out = open_output(path);
    out << "t,s_plus,s_minus,s_max,s_min,v_inst\n";
    for (std::size_t s = 0; s < series.t.size(); ++s) {
        out << fmt_g17(series.t[s]) << ',' << fmt_g17(series.s_plus[s]) << ','
            << fmt_g17(series.s_minus[s]) << ',' << fmt_g17(series.s_max[s]) << ','
            << fmt_g17(series.s_min[s]) << ',' << fmt_g17(series.v_inst[s]) << "\n";
    }
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline json to_json(const CouplingDistribution& dist) {
    json j;
    j["name"] = distribution_name(dist);
    if (const auto* dd = std::get_if<DoubleDelta>(&dist)) {
        j["p"] = dd->p;
        j["kp"] = dd->k_p;
        j["kn"] = dd->k_n;
    } else if (const auto* g = std::get_if<SingleGaussian>(&dist)) {
        j["mu"] = g->mu;
        j["sigma"] = g->sigma;
    } else {
        const auto& m = std::get<MixedGaussian>(dist);
        j["p"] = m.p;
        j["kp"] = m.k_p;
        j["kn"] = m.k_n;
        j["sigma"] = m.sigma;
    }
    return j;
}

inline CouplingDistribution distribution_from_json(const json& j) {
    const std::string name = j.value("name", "double-delta");
    CouplingDistribution dist;
    if (name == "double-delta") {
        dist = DoubleDelta{j.at("p").get<double>(), j.at("kp").get<double>(),
                           j.at("kn").get<double>()};
    } else if (name == "gaussian") {
        dist = SingleGaussian{j.at("mu").get<double>(), j.at("sigma").get<double>()};
    } else if (name == "mixed-gaussian") {
        dist = MixedGaussian{j.at("p").get<double>(), j.at("kp").get<double>(),
                             j.at("kn").get<double>(), j.at("sigma").get<double>()};
    } else {
        throw ConfigError("unknown distribution name: " + name);
    }
    validate(dist);
    return dist;
}

inline json to_json(const EigenSpectrum& spec) {
    json entries = json::array();
    for (const auto& e : spec.entries)
        entries.push_back({{"re", e.lambda.real()},
                           {"im", e.lambda.imag()},
                           {"multiplicity", e.multiplicity}});
    return {{"source", spec.source == SpectrumSource::analytic ? "analytic" : "numeric"},
            {"entries", entries}};
}

inline json to_json(const StabilityVerdict& v) {
    json conds = json::array();
    for (const auto& c : v.conditions)
        conds.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"margin", c.margin}});
    return {{"stable", v.stable}, {"conditions", conds}};
}

inline json to_json(const TrailingStats& st) {
    return {{"s_max", st.s_max},
            {"s_min", st.s_min},
            {"v", st.v},
            {"frac_x", st.frac_x},
            {"frac_theta", st.frac_theta}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace ringswarm

#endif
