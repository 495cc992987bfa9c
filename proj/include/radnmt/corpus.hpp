#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "radnmt/decomposition.hpp"
#include "radnmt/vocabulary.hpp"

namespace radnmt {

using Tokens = std::vector<std::string>;

struct SentencePair {
  Tokens source;  // pre-segmented Chinese words
  Tokens target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::size_t dropped = 0;  // pairs outside the length bound
};

/// Reads line-aligned source/target streams. Pairs where either side has no
/// tokens or more than `max_len` tokens are dropped and counted. Throws
/// InputError on unequal line counts or malformed UTF-8 (naming the line).
ParallelCorpus read_parallel(std::istream& source, std::istream& target, std::size_t max_len);
ParallelCorpus read_parallel_files(const std::string& source_path,
                                   const std::string& target_path, std::size_t max_len);

/// One tokenized sentence per line, no filtering. Empty lines give empty rows.
std::vector<Tokens> read_tokenized(std::istream& in, const std::string& label = "input");
std::vector<Tokens> read_tokenized_file(const std::string& path);
void write_tokenized(std::ostream& out, const std::vector<Tokens>& sentences);

/// Builds all four vocabularies. Character and radical frequencies are
/// accumulated through decompose_word over every source token.
GranularVocabulary build_vocab(const std::vector<SentencePair>& pairs,
                               const DecompositionTable& table, const VocabSizes& sizes);

/// Fraction of token occurrences that are in-vocabulary, per granularity.
struct Coverage {
  double source_words = 0.0;
  double characters = 0.0;
  double radicals = 0.0;
  double target_words = 0.0;
};

Coverage coverage(const std::vector<SentencePair>& pairs, const GranularVocabulary& vocab,
                  const DecompositionTable& table);

/// A source position: the word id plus the ids of its characters and radicals.
/// Each granularity falls back to UNK independently.
struct EncodedToken {
  int word = kPadId;
  std::vector<int> characters{kPadId};
  std::vector<int> radicals{kPadId};

  bool operator==(const EncodedToken&) const = default;
};

using EncodedSource = std::vector<EncodedToken>;

EncodedSource encode_source(const Tokens& words, const GranularVocabulary& vocab,
                            const DecompositionTable& table);

/// Target ids followed by EOS.
std::vector<int> encode_target(const Tokens& words, const Vocabulary& target_vocab);

/// Rows are padded to the longest sentence in the batch; masks are 1 on real
/// positions. Target rows end with EOS, which counts as a real position.
struct EncodedBatch {
  std::vector<EncodedSource> source;
  std::vector<std::vector<int>> target;
  std::vector<std::size_t> source_lengths;
  std::vector<std::size_t> target_lengths;
  std::vector<std::vector<std::uint8_t>> source_mask;
  std::vector<std::vector<std::uint8_t>> target_mask;

  std::size_t size() const { return source.size(); }
};

EncodedBatch make_batch(const std::vector<EncodedSource>& sources,
                        const std::vector<std::vector<int>>& targets);

/// Splits the corpus into consecutive batches of at most `batch_size` pairs,
/// in corpus order unless a shuffle seed is given.
std::vector<EncodedBatch> encode_batches(const std::vector<SentencePair>& pairs,
                                         const GranularVocabulary& vocab,
                                         const DecompositionTable& table, std::size_t batch_size,
                                         std::optional<std::uint64_t> shuffle_seed = std::nullopt);

}  // namespace radnmt
