#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "radnmt/model.hpp"

namespace radnmt {

inline constexpr char kCheckpointMagic[8] = {'R', 'A', 'D', 'N', 'M', 'T', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (all integers little-endian uint32):
///   magic[8] version setting d H word_vocab char_vocab radical_vocab
///   target_vocab tensor_count
///   per tensor: name_len name[name_len] rank shape[rank] float32[prod(shape)]
/// Tensors are written row-major in ModelParams::for_each order.
void write_checkpoint(std::ostream& out, const ModelParams<float>& params);
ModelParams<float> read_checkpoint(std::istream& in);

/// Writes to "<path>.tmp" and renames over `path`, so a crash never leaves a
/// truncated checkpoint behind.
void save_checkpoint(const std::string& path, const ModelParams<float>& params);
ModelParams<float> load_checkpoint(const std::string& path);

/// Sidecar "<checkpoint>.meta.json".
struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::optional<double> dev_bleu;
  std::size_t update = 0;
};

std::string meta_path(const std::string& checkpoint_path);
void save_meta(const std::string& checkpoint_path, const CheckpointMeta& meta);
CheckpointMeta load_meta(const std::string& checkpoint_path);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace radnmt
