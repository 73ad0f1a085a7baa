#pragma once

#include <string>

#include "girnet/params.hpp"

namespace girnet {

// Flat binary container: 7-byte header "GIRNET1", then a u64 entry count,
// then per entry a u32 path length, the path bytes, a u32 rank, u64 dims and
// the raw little-endian 64-bit values. Round trips are bit-exact.

void save_checkpoint(const ParamStore& store, const std::string& path);

/// Loads into an existing store. Every stored parameter must be present in
/// the file with an identical shape and vice versa.
void load_checkpoint(ParamStore& store, const std::string& path);

} // namespace girnet
