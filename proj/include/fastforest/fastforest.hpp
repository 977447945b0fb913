#pragma once

// Umbrella header: the whole library.

#include "fastforest/dataset.hpp"
#include "fastforest/eval.hpp"
#include "fastforest/forest.hpp"
#include "fastforest/io.hpp"
#include "fastforest/model_io.hpp"
#include "fastforest/rng.hpp"
#include "fastforest/split.hpp"
#include "fastforest/tree.hpp"

namespace fastforest {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace fastforest
