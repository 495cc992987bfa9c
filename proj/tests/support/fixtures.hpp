#pragma once

#include <random>
#include <string>
#include <vector>

#include "radnmt/corpus.hpp"
#include "radnmt/model.hpp"

#ifndef RADNMT_DATA_DIR
#define RADNMT_DATA_DIR "data"
#endif

namespace radnmt::testing {

inline std::string data_path(const std::string& name) {
  return std::string(RADNMT_DATA_DIR) + "/" + name;
}

// d=8, H=12, every vocabulary 20 entries.
inline ModelDims micro_dims() {
  ModelDims dims;
  dims.embedding = 8;
  dims.hidden = 12;
  dims.word_vocab = 20;
  dims.char_vocab = 20;
  dims.radical_vocab = 20;
  dims.target_vocab = 20;
  return dims;
}

inline int random_id(std::mt19937_64& rng, int vocab) {
  // Skip PAD/BOS/EOS but allow UNK.
  std::uniform_int_distribution<int> dist(static_cast<int>(kNumSpecials), vocab - 1);
  const int id = dist(rng);
  return id == kNumSpecials ? kUnkId : id;
}

inline EncodedSource random_source(std::mt19937_64& rng, std::size_t length, const ModelDims& dims) {
  EncodedSource src;
  std::uniform_int_distribution<int> chars(1, 3), rads(1, 4);
  for (std::size_t j = 0; j < length; ++j) {
    EncodedToken tok;
    tok.word = random_id(rng, dims.word_vocab);
    tok.characters.clear();
    tok.radicals.clear();
    for (int k = chars(rng); k > 0; --k) tok.characters.push_back(random_id(rng, dims.char_vocab));
    for (int k = rads(rng); k > 0; --k) tok.radicals.push_back(random_id(rng, dims.radical_vocab));
    src.push_back(std::move(tok));
  }
  return src;
}

inline std::vector<int> random_target(std::mt19937_64& rng, std::size_t length, const ModelDims& dims) {
  std::vector<int> ids;
  for (std::size_t t = 0; t < length; ++t) ids.push_back(random_id(rng, dims.target_vocab));
  ids.push_back(kEosId);
  return ids;
}

inline EncodedBatch random_batch(std::mt19937_64& rng, std::size_t sentences, const ModelDims& dims,
                                 std::size_t max_len = 5) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::vector<EncodedSource> sources;
  std::vector<std::vector<int>> targets;
  for (std::size_t i = 0; i < sentences; ++i) {
    sources.push_back(random_source(rng, len(rng), dims));
    targets.push_back(random_target(rng, len(rng), dims));
  }
  return make_batch(sources, targets);
}

// Initialized model with every coordinate (biases included) jittered so that
// no gradient path is trivially zero.
template <class Real>
ModelParams<Real> jittered_model(CompositionSetting setting, const ModelDims& dims,
                                 std::uint64_t seed, double jitter = 0.2) {
  auto p = init_model<Real>(setting, dims, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(-jitter, jitter);
  for (auto& t : p.tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) t.data[i] += static_cast<Real>(dist(rng));
  }
  return p;
}

}  // namespace radnmt::testing
