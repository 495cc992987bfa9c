#include "radnmt/decomposition.hpp"

#include <fstream>
#include <sstream>

#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

namespace radnmt {

bool DecompositionTable::set(const std::string& character,
                             const std::vector<std::string>& components) {
  if (!utf8::is_single_scalar(character)) {
    throw InputError("decomposition key is not a single character: \"" + character + "\"");
  }
  std::vector<std::string> scalars;
  for (const auto& component : components) {
    for (auto& s : utf8::split_scalars(component)) scalars.push_back(std::move(s));
  }
  if (scalars.empty()) {
    throw InputError("empty component list for \"" + character + "\"");
  }
  auto [it, inserted] = entries_.insert_or_assign(character, std::move(scalars));
  if (!inserted) ++duplicates_;
  return !inserted;
}

const std::vector<std::string>* DecompositionTable::find(std::string_view character) const {
  auto it = entries_.find(character);
  return it == entries_.end() ? nullptr : &it->second;
}

DecompositionTable load_table(std::istream& source) {
  DecompositionTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto where = [&] { return "decomposition table line " + std::to_string(line_no); };
    if (!utf8::is_valid(line)) throw ParseError(where() + ": invalid UTF-8");
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kVersionTag = "# version:";
      if (line.rfind(kVersionTag, 0) == 0) {
        auto tag = line.substr(kVersionTag.size());
        tag.erase(0, tag.find_first_not_of(' '));
        table.version_ = tag;
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(where() + ": expected exactly 2 tab-separated fields");
    }
    const std::string key = line.substr(0, tab);
    if (!utf8::is_single_scalar(key)) {
      throw ParseError(where() + ": key \"" + key + "\" is not a single character");
    }
    const auto components = utf8::split_tokens(std::string_view(line).substr(tab + 1));
    if (components.empty()) throw ParseError(where() + ": empty component list");
    table.set(key, components);
  }
  if (table.empty()) throw ParseError("decomposition table has no entries");
  return table;
}

DecompositionTable load_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open decomposition table " + path);
  return load_table(in);
}

void save_table(const DecompositionTable& table, std::ostream& out) {
  if (!table.version().empty()) out << "# version: " << table.version() << '\n';
  for (const auto& [key, components] : table.entries()) {
    out << key << '\t';
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i) out << ' ';
      out << components[i];
    }
    out << '\n';
  }
}

std::vector<std::string> decompose_char(const DecompositionTable& table,
                                        std::string_view character) {
  if (const auto* components = table.find(character)) return *components;
  return {std::string(character)};
}

WordDecomposition decompose_word(const DecompositionTable& table, std::string_view word) {
  if (word.empty()) throw InputError("cannot decompose an empty word");
  WordDecomposition out;
  out.word = std::string(word);
  out.characters = utf8::split_scalars(word);
  for (const auto& c : out.characters) {
    for (auto& r : decompose_char(table, c)) out.radicals.push_back(std::move(r));
  }
  return out;
}

}  // namespace radnmt
