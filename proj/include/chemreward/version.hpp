#pragma once

#include <string_view>

namespace chemreward {

#ifndef CHEMREWARD_VERSION
#define CHEMREWARD_VERSION "0.0.0"
#endif

inline constexpr std::string_view kEngineVersion = CHEMREWARD_VERSION;
/// Version of the reward request/response line protocol.
inline constexpr int kProtocolVersion = 1;

}  // namespace chemreward
