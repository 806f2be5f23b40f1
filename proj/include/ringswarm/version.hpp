#ifndef RINGSWARM_VERSION_HPP
#define RINGSWARM_VERSION_HPP

namespace ringswarm {

inline constexpr const char* version = "0.1.0";

} // namespace ringswarm

#endif
