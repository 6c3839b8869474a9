#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evosteer/diffusion.hpp"
#include "evosteer/linalg.hpp"

namespace evosteer {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  Vec data;  // f64, row-major

  std::size_t element_count() const;
};

/// Little-endian binary tensor container. Layout: magic "EVST", format
/// version (u32), action_dim (u32), context_dim (u32), T (u32),
/// beta_start (f64), beta_end (f64), tensor count (u32), then per tensor:
/// name length (u32), name bytes, rank (u32), dims (u32 each), f64 data.
/// Demo datasets reuse the container with T = 0.
struct TensorFile {
  std::uint32_t format_version = kCheckpointFormatVersion;
  std::uint32_t action_dim = 0;
  std::uint32_t context_dim = 0;
  std::uint32_t steps = 0;
  double beta_start = 0.0;
  double beta_end = 0.0;
  std::vector<NamedTensor> tensors;

  const NamedTensor& find(const std::string& name) const;
  bool contains(const std::string& name) const;
};

void write_tensor_file(const std::string& path, const TensorFile& file);
TensorFile read_tensor_file(const std::string& path);

void save_model(const std::string& path, const DenoiserModel& model);
DenoiserModel load_model(const std::string& path);

void save_demos(const std::string& path, const std::vector<Demo>& demos);
std::vector<Demo> load_demos(const std::string& path);

}  // namespace evosteer
