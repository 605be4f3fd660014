#pragma once

#include <cstdint>

namespace cropmarl {

/// Dense index into the common state space.
using StateId = std::int32_t;
/// Dense index into the common action space.
using ActionId = std::int32_t;
/// Dense index into the crop list.
using CropId = std::int32_t;

inline constexpr CropId kNoCrop = -1;

}  // namespace cropmarl
