#include "radnmt/vocabulary.hpp"

#include <algorithm>
#include <fstream>

#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

namespace radnmt {

namespace {

constexpr std::string_view kSpecials[kNumSpecials] = {kPadToken, kUnkToken, kBosToken,
                                                      kEosToken};

}  // namespace

Vocabulary::Vocabulary() {
  for (const auto special : kSpecials) append(std::string(special), 0);
}

void Vocabulary::append(std::string token, std::int64_t frequency) {
  const int id = static_cast<int>(tokens_.size());
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
  frequencies_.push_back(frequency);
}

Vocabulary Vocabulary::from_counts(const FrequencyMap& counts, std::size_t max_size) {
  if (max_size < kNumSpecials) {
    throw ConfigError("vocabulary size " + std::to_string(max_size) +
                      " is smaller than the special-token count");
  }
  std::vector<std::pair<std::string, std::int64_t>> items;
  items.reserve(counts.size());
  for (const auto& [token, count] : counts) {
    // Observed surface forms that collide with a special keep the special id.
    if (std::find(std::begin(kSpecials), std::end(kSpecials), token) != std::end(kSpecials)) {
      continue;
    }
    items.emplace_back(token, count);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  const std::size_t keep = std::min(items.size(), max_size - kNumSpecials);
  for (std::size_t i = 0; i < keep; ++i) vocab.append(std::move(items[i].first), items[i].second);
  return vocab;
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary vocab;
  vocab.tokens_.clear();
  vocab.frequencies_.clear();
  vocab.index_.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto where = "vocabulary line " + std::to_string(line_no);
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(where + ": expected <token>\\t<frequency>");
    std::string token = line.substr(0, tab);
    if (!utf8::is_valid(token)) throw ParseError(where + ": invalid UTF-8");
    std::int64_t frequency = 0;
    try {
      std::size_t used = 0;
      frequency = std::stoll(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(where + ": bad frequency");
    }
    if (vocab.index_.count(token)) throw ParseError(where + ": duplicate token " + token);
    if (vocab.tokens_.size() < kNumSpecials && token != kSpecials[vocab.tokens_.size()]) {
      throw ParseError(where + ": expected special token " +
                       std::string(kSpecials[vocab.tokens_.size()]));
    }
    vocab.append(std::move(token), frequency);
  }
  if (vocab.tokens_.size() < kNumSpecials) throw ParseError("vocabulary is missing special tokens");
  return vocab;
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary " + path);
  return load(in);
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << frequencies_[i] << '\n';
  }
}

void Vocabulary::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary " + path);
  save(out);
  if (!out) throw IoError("write failed for " + path);
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw InputError("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> ids_to_tokens(const Vocabulary& vocab, std::span<const int> ids) {
  std::vector<std::string> out;
  for (const int id : ids) {
    if (id == kEosId) break;
    if (id == kPadId || id == kBosId) continue;
    out.push_back(vocab.token(id));
  }
  return out;
}

}  // namespace radnmt
