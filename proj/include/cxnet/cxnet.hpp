#pragma once

#include "cxnet/complexity.hpp"
#include "cxnet/ensemble.hpp"
#include "cxnet/entropy.hpp"
#include "cxnet/error.hpp"
#include "cxnet/format.hpp"
#include "cxnet/graph.hpp"
#include "cxnet/lattice.hpp"
#include "cxnet/parallel.hpp"
#include "cxnet/rng.hpp"
#include "cxnet/son.hpp"
#include "cxnet/traffic.hpp"

namespace cxnet {
inline constexpr const char* kVersion = "0.1.0";
}
