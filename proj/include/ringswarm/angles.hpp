#ifndef RINGSWARM_ANGLES_HPP
#define RINGSWARM_ANGLES_HPP

#include <cmath>
#include <numbers>

namespace ringswarm {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

/// Reduce an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod of a tiny negative can round the sum up to exactly 2*pi
    return (r >= two_pi) ? 0.0 : r;
}

/// Signed minimal-branch displacement from `prev` to `next`, both wrapped
/// angles. Result lies in (-pi, pi]. Faithful only when the true per-step
/// displacement is below pi in magnitude; the integrator checks that bound
/// on the raw displacements it accumulates.
inline double unwrap_increment(double prev, double next) {
    double d = std::fmod(next - prev, two_pi);
    if (d > pi) d -= two_pi;
    if (d <= -pi) d += two_pi;
    return d;
}

/// Shortest angular distance between two wrapped angles.
inline double angular_distance(double a, double b) {
    return std::abs(unwrap_increment(a, b));
}

} // namespace ringswarm

#endif
