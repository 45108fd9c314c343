#pragma once

namespace adaptbpe {

inline constexpr const char* kToolVersion = "adaptbpe 0.1.0";

}  // namespace adaptbpe
