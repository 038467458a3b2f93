#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ssrn/numcore/graph.hpp"
#include "ssrn/training/adam.hpp"
#include "ssrn/training/config.hpp"
#include "ssrn/training/model.hpp"

namespace ssrn::io {

// Layout (little-endian):
//   magic "SSRNCKPT" | u32 version | u64 n + n bytes of config key=value text
//   u32 param count, then per param: u32 name length, name, u32 rows, u32 cols, rows*cols f64
//   u8 has_adam; if set: u64 step, f64 beta1, beta2, eps, then m and v for every param (f64)
//   u64 FNV-1a of every preceding byte
inline constexpr char kCheckpointMagic[8] = {'S', 'S', 'R', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  train::TrainConfig config;
  ad::ParamStore params;
  std::optional<train::AdamState> adam;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Checks magic (FormatError), then checksum (IntegrityError), then version
/// (VersionError) before decoding anything else.
Checkpoint decode_checkpoint(const std::string& bytes, const std::string& what = "checkpoint");

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const train::TrainConfig& config, const train::SsrnModel& model,
                           const train::AdamState* adam = nullptr);

/// ShapeError if the checkpoint's network cannot run with `wanted` (M, K, D,
/// feature widths or architecture switches differ).
void check_compatible(const train::ModelConfig& stored, const train::ModelConfig& wanted);

/// Rebuilds the network from the stored config and copies every parameter in,
/// checking names and shapes.
train::SsrnModel restore_model(const Checkpoint& ckpt);

}  // namespace ssrn::io
