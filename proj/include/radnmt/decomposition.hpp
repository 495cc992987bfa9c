#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace radnmt {

/// Character-to-component mapping, one level deep.
///
/// Keys are single Unicode scalars; values are the ordered immediate
/// components of that character (each itself a single scalar). The table is
/// immutable once loaded and safe to share between threads.
class DecompositionTable {
 public:
  DecompositionTable() = default;

  /// Inserts or replaces an entry. Multi-scalar components are split into
  /// scalars. Returns true if an existing key was overwritten.
  bool set(const std::string& character, const std::vector<std::string>& components);

  const std::vector<std::string>* find(std::string_view character) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Number of lines whose key repeated an earlier line (last one wins).
  std::size_t duplicate_count() const { return duplicates_; }

  const std::string& version() const { return version_; }
  void set_version(std::string version) { version_ = std::move(version); }

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
  std::size_t duplicates_ = 0;
  std::string version_;

  friend DecompositionTable load_table(std::istream& source);
};

/// Parses the tab-separated table format:
///   <char> TAB <component> [SPACE <component>]...
/// '#' starts a comment line, blank lines are skipped. A comment of the form
/// "# version: <tag>" sets the version tag. Throws ParseError naming the line
/// on malformed input and on an empty stream.
DecompositionTable load_table(std::istream& source);
DecompositionTable load_table_file(const std::string& path);

void save_table(const DecompositionTable& table, std::ostream& out);

/// Components of one scalar; characters missing from the table decompose to
/// themselves.
std::vector<std::string> decompose_char(const DecompositionTable& table,
                                        std::string_view character);

struct WordDecomposition {
  std::string word;
  std::vector<std::string> characters;
  std::vector<std::string> radicals;

  std::size_t m() const { return characters.size(); }
  std::size_t n() const { return radicals.size(); }
};

/// Splits a word into its characters and the concatenated radicals of those
/// characters. Throws InputError for an empty or non-UTF-8 word.
WordDecomposition decompose_word(const DecompositionTable& table, std::string_view word);

}  // namespace radnmt
