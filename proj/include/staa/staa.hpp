#pragma once

#include "staa/activity.hpp"
#include "staa/baselines.hpp"
#include "staa/diffusion.hpp"
#include "staa/error.hpp"
#include "staa/eval.hpp"
#include "staa/graph.hpp"
#include "staa/io.hpp"
#include "staa/spectral.hpp"
#include "staa/synth.hpp"

namespace staa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace staa
