// include/prsmos/rng.h

// Copyright 2026 The prsmos Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PRSMOS_RNG_H_
#define PRSMOS_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace prsmos {

using Rng = std::mt19937_64;

// Derives an independent seed for a named component ("split", "init",
// "shuffle", "bapmos", "sim", ...) from the global run seed. Changing how
// one component consumes randomness never shifts another component's draws.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view component);

// Same as above with an extra integer index, e.g. the semi-supervised round.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view component,
                             std::uint64_t index);

inline Rng make_rng(std::uint64_t seed, std::string_view component) {
  return Rng(substream_seed(seed, component));
}

}  // namespace prsmos

#endif  // PRSMOS_RNG_H_
