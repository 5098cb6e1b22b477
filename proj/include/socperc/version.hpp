#pragma once

namespace socperc {

inline constexpr const char* kVersion = "0.1.0";

}
