#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace radnmt {

// Reserved ids, identical in every granularity.
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kBosId = 2;
inline constexpr int kEosId = 3;
inline constexpr std::size_t kNumSpecials = 4;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "UNK";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";

using FrequencyMap = std::unordered_map<std::string, std::int64_t>;

/// Dense id space over tokens of one granularity.
///
/// Ids [0, kNumSpecials) hold the special tokens; the remaining ids are the
/// most frequent observed items in descending frequency, ties broken by
/// codepoint order (byte order of the UTF-8 encoding).
class Vocabulary {
 public:
  Vocabulary();

  /// Keeps the top (max_size - kNumSpecials) items of `counts`.
  static Vocabulary from_counts(const FrequencyMap& counts, std::size_t max_size);

  /// Reads the "<token>\t<frequency>" format written by save(). The first
  /// kNumSpecials lines must be the special tokens in id order.
  static Vocabulary load(std::istream& in);
  static Vocabulary load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  /// kUnkId for unknown tokens.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::int64_t frequency(int id) const { return frequencies_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void append(std::string token, std::int64_t frequency);

  std::vector<std::string> tokens_;
  std::vector<std::int64_t> frequencies_;
  std::unordered_map<std::string, int> index_;
};

/// Source-side word/character/radical id spaces plus the target word space.
struct GranularVocabulary {
  Vocabulary words;
  Vocabulary characters;
  Vocabulary radicals;
  Vocabulary target;
};

struct VocabSizes {
  std::size_t words = 30000;
  std::size_t characters = 2500;
  std::size_t radicals = 1000;
  std::size_t target = 30000;

  bool operator==(const VocabSizes&) const = default;
};

/// Maps ids back to tokens, dropping PAD/BOS and stopping at EOS.
std::vector<std::string> ids_to_tokens(const Vocabulary& vocab, std::span<const int> ids);

}  // namespace radnmt
