#include "radnmt/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radnmt/error.hpp"

namespace radnmt {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                     static_cast<char>((v >> 16) & 0xFF),
                                     static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes.data(), 4);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 4)) {
    throw ParseError(std::string("checkpoint truncated while reading ") + what);
  }
  return std::uint32_t{bytes[0]} | (std::uint32_t{bytes[1]} << 8) |
         (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 24);
}

std::uint32_t to_u32(Eigen::Index v) { return static_cast<std::uint32_t>(v); }

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams<float>& params) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.setting));
  const auto& d = params.dims;
  for (const int v : {d.embedding, d.hidden, d.word_vocab, d.char_vocab, d.radical_vocab,
                      d.target_vocab}) {
    put_u32(out, static_cast<std::uint32_t>(v));
  }
  const auto tensors = params.tensors();
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (const auto dim : t.shape) put_u32(out, to_u32(dim));
    for (Eigen::Index i = 0; i < t.size; ++i) put_u32(out, std::bit_cast<std::uint32_t>(t.data[i]));
  }
  if (!out) throw IoError("checkpoint write failed");
}

ModelParams<float> read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError("not a radnmt checkpoint (bad magic)");
  }
  const auto version = get_u32(in, "version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto setting_code = get_u32(in, "setting");
  if (setting_code > 255) throw ParseError("invalid setting code in checkpoint");
  const auto setting = setting_from_code(static_cast<std::uint8_t>(setting_code));
  ModelDims dims;
  dims.embedding = static_cast<int>(get_u32(in, "dims"));
  dims.hidden = static_cast<int>(get_u32(in, "dims"));
  dims.word_vocab = static_cast<int>(get_u32(in, "vocabulary sizes"));
  dims.char_vocab = static_cast<int>(get_u32(in, "vocabulary sizes"));
  dims.radical_vocab = static_cast<int>(get_u32(in, "vocabulary sizes"));
  dims.target_vocab = static_cast<int>(get_u32(in, "vocabulary sizes"));
  auto params = ModelParams<float>::zeros(setting, dims);
  auto tensors = params.tensors();
  const auto count = get_u32(in, "tensor count");
  if (count != tensors.size()) {
    throw ParseError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                     std::to_string(tensors.size()));
  }
  for (auto& t : tensors) {
    const auto name_len = get_u32(in, "tensor name");
    if (name_len > 4096) throw ParseError("implausible tensor name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw ParseError("checkpoint truncated in tensor name");
    if (name != t.name) throw ParseError("unexpected tensor " + name + " (expected " + t.name + ")");
    const auto rank = get_u32(in, "tensor rank");
    if (rank != t.shape.size()) throw ParseError("rank mismatch for tensor " + name);
    for (const auto dim : t.shape) {
      if (get_u32(in, "tensor shape") != to_u32(dim)) throw ParseError("shape mismatch for tensor " + name);
    }
    for (Eigen::Index i = 0; i < t.size; ++i) {
      t.data[i] = std::bit_cast<float>(get_u32(in, "tensor data"));
    }
  }
  return params;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

void save_checkpoint(const std::string& path, const ModelParams<float>& params) {
  std::ostringstream buffer(std::ios::binary);
  write_checkpoint(buffer, params);
  write_file_atomic(path, buffer.str());
}

ModelParams<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

std::string meta_path(const std::string& checkpoint_path) { return checkpoint_path + ".meta.json"; }

void save_meta(const std::string& checkpoint_path, const CheckpointMeta& meta) {
  nlohmann::json j;
  j["seed"] = meta.seed;
  j["config_hash"] = meta.config_hash;
  j["dev_bleu"] = meta.dev_bleu ? nlohmann::json(*meta.dev_bleu) : nlohmann::json(nullptr);
  j["update"] = meta.update;
  j["format_version"] = kCheckpointVersion;
  write_file_atomic(meta_path(checkpoint_path), j.dump(2) + "\n");
}

CheckpointMeta load_meta(const std::string& checkpoint_path) {
  const auto path = meta_path(checkpoint_path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    CheckpointMeta meta;
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.config_hash = j.at("config_hash").get<std::string>();
    if (!j.at("dev_bleu").is_null()) meta.dev_bleu = j.at("dev_bleu").get<double>();
    meta.update = j.at("update").get<std::size_t>();
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace radnmt
