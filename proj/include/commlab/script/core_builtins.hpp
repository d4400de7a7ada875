#pragma once

#include "commlab/script/registry.hpp"

namespace commlab::script {

/// General-purpose builtins: arithmetic helpers, conversions, printing and plotting.
void register_core(BuiltinRegistry& reg);

}  // namespace commlab::script
