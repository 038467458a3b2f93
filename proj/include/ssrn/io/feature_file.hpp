#pragma once

#include <cstdint>
#include <string>

#include "ssrn/numcore/matrix.hpp"

namespace ssrn::io {

// Layout (all integers little-endian):
//   0   8 bytes  magic "SSRNFEAT"
//   8   u32      version (1)
//   12  u32      rows
//   16  u32      cols
//   20  rows*cols float32, row-major
inline constexpr char kFeatureMagic[8] = {'S', 'S', 'R', 'N', 'F', 'E', 'A', 'T'};
inline constexpr std::uint32_t kFeatureVersion = 1;

/// Reads a feature file, widening to double. FormatError on bad magic or
/// version, LengthError on a payload shorter or longer than declared.
num::Matrix load_features(const std::string& path);

/// Writes values narrowed to float32.
void save_features(const num::Matrix& m, const std::string& path);

}  // namespace ssrn::io
