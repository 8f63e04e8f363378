#pragma once

namespace rnnv {

inline constexpr const char* project_name = "rnnv-forge";
inline constexpr const char* project_version = "0.1.0";

} // namespace rnnv
