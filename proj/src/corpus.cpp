#include "radnmt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

namespace radnmt {

namespace {

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

Tokens tokenize_checked(const std::string& line, const std::string& label, std::size_t line_no) {
  if (!utf8::is_valid(line)) {
    throw InputError(label + " line " + std::to_string(line_no) + ": invalid UTF-8");
  }
  return utf8::split_tokens(line);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

}  // namespace

ParallelCorpus read_parallel(std::istream& source, std::istream& target, std::size_t max_len) {
  ParallelCorpus corpus;
  std::string src_line;
  std::string tgt_line;
  std::size_t line_no = 0;
  while (true) {
    const bool has_src = next_line(source, src_line);
    const bool has_tgt = next_line(target, tgt_line);
    if (!has_src && !has_tgt) break;
    ++line_no;
    if (has_src != has_tgt) {
      throw InputError("parallel corpus line counts differ (first mismatch at line " +
                       std::to_string(line_no) + ")");
    }
    SentencePair pair{tokenize_checked(src_line, "source", line_no),
                      tokenize_checked(tgt_line, "target", line_no)};
    const auto in_bounds = [max_len](const Tokens& t) { return !t.empty() && t.size() <= max_len; };
    if (in_bounds(pair.source) && in_bounds(pair.target)) {
      corpus.pairs.push_back(std::move(pair));
    } else {
      ++corpus.dropped;
    }
  }
  return corpus;
}

ParallelCorpus read_parallel_files(const std::string& source_path, const std::string& target_path,
                                   std::size_t max_len) {
  auto src = open_input(source_path);
  auto tgt = open_input(target_path);
  return read_parallel(src, tgt, max_len);
}

std::vector<Tokens> read_tokenized(std::istream& in, const std::string& label) {
  std::vector<Tokens> out;
  std::string line;
  while (next_line(in, line)) out.push_back(tokenize_checked(line, label, out.size() + 1));
  return out;
}

std::vector<Tokens> read_tokenized_file(const std::string& path) {
  auto in = open_input(path);
  return read_tokenized(in, path);
}

void write_tokenized(std::ostream& out, const std::vector<Tokens>& sentences) {
  for (const auto& sentence : sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out << ' ';
      out << sentence[i];
    }
    out << '\n';
  }
}

GranularVocabulary build_vocab(const std::vector<SentencePair>& pairs,
                               const DecompositionTable& table, const VocabSizes& sizes) {
  if (pairs.empty()) throw InputError("cannot build vocabularies from an empty corpus");
  FrequencyMap words, characters, radicals, target;
  for (const auto& pair : pairs) {
    for (const auto& word : pair.source) {
      ++words[word];
      const auto parts = decompose_word(table, word);
      for (const auto& c : parts.characters) ++characters[c];
      for (const auto& r : parts.radicals) ++radicals[r];
    }
    for (const auto& word : pair.target) ++target[word];
  }
  return GranularVocabulary{Vocabulary::from_counts(words, sizes.words),
                            Vocabulary::from_counts(characters, sizes.characters),
                            Vocabulary::from_counts(radicals, sizes.radicals),
                            Vocabulary::from_counts(target, sizes.target)};
}

Coverage coverage(const std::vector<SentencePair>& pairs, const GranularVocabulary& vocab,
                  const DecompositionTable& table) {
  struct Tally {
    std::size_t covered = 0;
    std::size_t total = 0;
    void add(const Vocabulary& v, const std::string& token) {
      ++total;
      if (v.contains(token)) ++covered;
    }
    double fraction() const {
      return total == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(total);
    }
  };
  Tally words, characters, radicals, target;
  for (const auto& pair : pairs) {
    for (const auto& word : pair.source) {
      words.add(vocab.words, word);
      const auto parts = decompose_word(table, word);
      for (const auto& c : parts.characters) characters.add(vocab.characters, c);
      for (const auto& r : parts.radicals) radicals.add(vocab.radicals, r);
    }
    for (const auto& word : pair.target) target.add(vocab.target, word);
  }
  return {words.fraction(), characters.fraction(), radicals.fraction(), target.fraction()};
}

EncodedSource encode_source(const Tokens& words, const GranularVocabulary& vocab,
                            const DecompositionTable& table) {
  EncodedSource out;
  out.reserve(words.size());
  for (const auto& word : words) {
    const auto parts = decompose_word(table, word);
    EncodedToken token;
    token.word = vocab.words.id(word);
    token.characters.clear();
    token.radicals.clear();
    for (const auto& c : parts.characters) token.characters.push_back(vocab.characters.id(c));
    for (const auto& r : parts.radicals) token.radicals.push_back(vocab.radicals.id(r));
    out.push_back(std::move(token));
  }
  return out;
}

std::vector<int> encode_target(const Tokens& words, const Vocabulary& target_vocab) {
  std::vector<int> ids;
  ids.reserve(words.size() + 1);
  for (const auto& word : words) ids.push_back(target_vocab.id(word));
  ids.push_back(kEosId);
  return ids;
}

EncodedBatch make_batch(const std::vector<EncodedSource>& sources,
                        const std::vector<std::vector<int>>& targets) {
  if (sources.size() != targets.size()) throw ShapeError("batch source/target count mismatch");
  EncodedBatch batch;
  std::size_t max_src = 0;
  std::size_t max_tgt = 0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    max_src = std::max(max_src, sources[i].size());
    max_tgt = std::max(max_tgt, targets[i].size());
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto src = sources[i];
    auto tgt = targets[i];
    batch.source_lengths.push_back(src.size());
    batch.target_lengths.push_back(tgt.size());
    std::vector<std::uint8_t> src_mask(max_src, 0);
    std::vector<std::uint8_t> tgt_mask(max_tgt, 0);
    std::fill_n(src_mask.begin(), src.size(), 1);
    std::fill_n(tgt_mask.begin(), tgt.size(), 1);
    src.resize(max_src);
    tgt.resize(max_tgt, kPadId);
    batch.source.push_back(std::move(src));
    batch.target.push_back(std::move(tgt));
    batch.source_mask.push_back(std::move(src_mask));
    batch.target_mask.push_back(std::move(tgt_mask));
  }
  return batch;
}

std::vector<EncodedBatch> encode_batches(const std::vector<SentencePair>& pairs,
                                         const GranularVocabulary& vocab,
                                         const DecompositionTable& table, std::size_t batch_size,
                                         std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<EncodedBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::vector<EncodedSource> sources;
    std::vector<std::vector<int>> targets;
    for (std::size_t k = start; k < end; ++k) {
      const auto& pair = pairs[order[k]];
      sources.push_back(encode_source(pair.source, vocab, table));
      targets.push_back(encode_target(pair.target, vocab.target));
    }
    batches.push_back(make_batch(sources, targets));
  }
  return batches;
}

}  // namespace radnmt
