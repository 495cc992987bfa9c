#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"
#include "radnmt/checkpoint.hpp"
#include "radnmt/error.hpp"

using namespace radnmt;
using namespace radnmt::testing;

namespace fs = std::filesystem;

namespace {

std::string serialize(const ModelParams<float>& p) {
  std::ostringstream out;
  write_checkpoint(out, p);
  return out.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("radnmt_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  for (auto setting : kAllSettings) {
    const auto p = jittered_model<float>(setting, micro_dims(), 5);
    const auto bytes = serialize(p);
    std::istringstream in(bytes);
    const auto q = read_checkpoint(in);
    CHECK(q.setting == setting);
    CHECK(q.dims == p.dims);
    CHECK(serialize(q) == bytes);
    const auto a = p.tensors();
    const auto b = q.tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(std::memcmp(a[k].data, b[k].data, sizeof(float) * static_cast<std::size_t>(a[k].size)) == 0);
    }
  }
}

TEST_CASE("checkpoint header layout") {
  const auto bytes = serialize(init_model<float>(CompositionSetting::WR, micro_dims(), 1));
  CHECK(bytes.substr(0, 8) == "RADNMTCK");
  const auto u32 = [&](std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)]);
    return v;
  };
  CHECK(u32(8) == kCheckpointVersion);
  CHECK(u32(12) == static_cast<std::uint32_t>(CompositionSetting::WR));
  CHECK(u32(16) == 8);
  CHECK(u32(20) == 12);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto bytes = serialize(init_model<float>(CompositionSetting::W, micro_dims(), 1));
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_checkpoint(truncated), ParseError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream magic(bad_magic);
  CHECK_THROWS_AS(read_checkpoint(magic), ParseError);
  auto bad_version = bytes;
  bad_version[8] = 99;
  std::istringstream version(bad_version);
  CHECK_THROWS_AS(read_checkpoint(version), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.bin"), IoError);
}

TEST_CASE("atomic save leaves no temporary file and meta round trips") {
  const auto dir = scratch_dir("ckpt");
  const auto path = (dir / "model.bin").string();
  const auto p = jittered_model<float>(CompositionSetting::WCR, micro_dims(), 2);
  save_checkpoint(path, p);
  CHECK_FALSE(fs::exists(path + ".tmp"));
  CHECK(serialize(load_checkpoint(path)) == serialize(p));

  save_meta(path, {42, "abcdef", 0.625, 300});
  const auto meta = load_meta(path);
  CHECK(meta.seed == 42);
  CHECK(meta.config_hash == "abcdef");
  REQUIRE(meta.dev_bleu.has_value());
  CHECK(*meta.dev_bleu == 0.625);
  CHECK(meta.update == 300);
  save_meta(path, {1, "x", std::nullopt, 0});
  CHECK_FALSE(load_meta(path).dev_bleu.has_value());

  // A stale temporary from an interrupted save does not affect the checkpoint.
  std::ofstream(path + ".tmp") << "partial";
  CHECK(serialize(load_checkpoint(path)) == serialize(p));
  fs::remove_all(dir);
}
