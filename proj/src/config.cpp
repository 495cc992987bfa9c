#include "radnmt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "radnmt/error.hpp"

namespace radnmt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <class T, class F>
Setter number(F field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
    field(c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"train.source", [](auto& c, auto&, auto& v) { c.train_source = v; }},
      {"train.target", [](auto& c, auto&, auto& v) { c.train_target = v; }},
      {"dev.source", [](auto& c, auto&, auto& v) { c.dev_source = v; }},
      {"dev.refs", [](auto& c, auto&, auto& v) { c.dev_refs = split_list(v); }},
      {"table", [](auto& c, auto&, auto& v) { c.table = v; }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"setting", [](auto& c, auto&, auto& v) { c.setting = parse_setting(v); }},
      {"embedding", number<int>([](ExperimentConfig& c) -> auto& { return c.embedding; })},
      {"hidden", number<int>([](ExperimentConfig& c) -> auto& { return c.hidden; })},
      {"vocab.words", number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.vocab.words; })},
      {"vocab.characters",
       number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.vocab.characters; })},
      {"vocab.radicals",
       number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.vocab.radicals; })},
      {"vocab.target", number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.vocab.target; })},
      {"max_len", number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.max_len; })},
      {"batch_size", number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.batch_size; })},
      {"dropout", number<double>([](ExperimentConfig& c) -> auto& { return c.dropout; })},
      {"clip_norm", number<double>([](ExperimentConfig& c) -> auto& { return c.clip_norm; })},
      {"adadelta.rho", number<double>([](ExperimentConfig& c) -> auto& { return c.rho; })},
      {"adadelta.epsilon", number<double>([](ExperimentConfig& c) -> auto& { return c.epsilon; })},
      {"beam", number<int>([](ExperimentConfig& c) -> auto& { return c.beam; })},
      {"max_updates", number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.max_updates; })},
      {"validate_every",
       number<std::size_t>([](ExperimentConfig& c) -> auto& { return c.validate_every; })},
      {"seed", number<std::uint64_t>([](ExperimentConfig& c) -> auto& { return c.seed; })},
      {"threads", number<unsigned>([](ExperimentConfig& c) -> auto& { return c.threads; })},
      {"hlepor.alpha", number<double>([](ExperimentConfig& c) -> auto& { return c.hlepor.alpha; })},
      {"hlepor.beta", number<double>([](ExperimentConfig& c) -> auto& { return c.hlepor.beta; })},
      {"hlepor.context", number<int>([](ExperimentConfig& c) -> auto& { return c.hlepor.context; })},
      {"hlepor.weight_length",
       number<double>([](ExperimentConfig& c) -> auto& { return c.hlepor.weight_length; })},
      {"hlepor.weight_position",
       number<double>([](ExperimentConfig& c) -> auto& { return c.hlepor.weight_position; })},
      {"hlepor.weight_fmeasure",
       number<double>([](ExperimentConfig& c) -> auto& { return c.hlepor.weight_fmeasure; })},
  };
  return table;
}

void resolve(std::string& path, const std::filesystem::path& base) {
  if (path.empty()) return;
  std::filesystem::path p(path);
  if (p.is_relative()) path = (base / p).lexically_normal().string();
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(!train_source.empty(), "train.source is required");
  require(!train_target.empty(), "train.target is required");
  require(!table.empty(), "table is required");
  require(!output_dir.empty(), "output_dir is required");
  require(!dev_source.empty(), "dev.source is required");
  require(!dev_refs.empty(), "dev.refs is required");
  require(embedding > 0, "embedding must be positive");
  require(hidden > 0, "hidden must be positive");
  require(vocab.words >= kNumSpecials && vocab.characters >= kNumSpecials &&
              vocab.radicals >= kNumSpecials && vocab.target >= kNumSpecials,
          "vocabulary sizes must be at least " + std::to_string(kNumSpecials));
  require(max_len > 0, "max_len must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(clip_norm >= 0.0 && std::isfinite(clip_norm), "clip_norm must be non-negative");
  require(rho > 0.0 && rho < 1.0, "adadelta.rho must be in (0, 1)");
  require(epsilon > 0.0, "adadelta.epsilon must be positive");
  require(beam > 0, "beam must be positive");
  require(validate_every > 0, "validate_every must be positive");
  require(threads > 0, "threads must be positive");
  require(hlepor.alpha > 0.0 && hlepor.beta > 0.0, "hlepor.alpha and hlepor.beta must be positive");
  require(hlepor.context >= 0, "hlepor.context must be non-negative");
  require(hlepor.weight_length > 0.0 && hlepor.weight_position > 0.0 &&
              hlepor.weight_fmeasure > 0.0,
          "hlepor weights must be positive");
}

void ExperimentConfig::resolve_paths(const std::filesystem::path& base) {
  resolve(train_source, base);
  resolve(train_target, base);
  resolve(dev_source, base);
  for (auto& r : dev_refs) resolve(r, base);
  resolve(table, base);
  resolve(output_dir, base);
}

std::string ExperimentConfig::to_string() const {
  std::ostringstream out;
  out << "train.source = " << train_source << "\n"
      << "train.target = " << train_target << "\n"
      << "dev.source = " << dev_source << "\n"
      << "dev.refs = " << join_list(dev_refs) << "\n"
      << "table = " << table << "\n"
      << "output_dir = " << output_dir << "\n"
      << "setting = " << setting_name(setting) << "\n"
      << "embedding = " << embedding << "\n"
      << "hidden = " << hidden << "\n"
      << "vocab.words = " << vocab.words << "\n"
      << "vocab.characters = " << vocab.characters << "\n"
      << "vocab.radicals = " << vocab.radicals << "\n"
      << "vocab.target = " << vocab.target << "\n"
      << "max_len = " << max_len << "\n"
      << "batch_size = " << batch_size << "\n"
      << "dropout = " << format_double(dropout) << "\n"
      << "clip_norm = " << format_double(clip_norm) << "\n"
      << "adadelta.rho = " << format_double(rho) << "\n"
      << "adadelta.epsilon = " << format_double(epsilon) << "\n"
      << "beam = " << beam << "\n"
      << "max_updates = " << max_updates << "\n"
      << "validate_every = " << validate_every << "\n"
      << "seed = " << seed << "\n"
      << "threads = " << threads << "\n"
      << "hlepor.alpha = " << format_double(hlepor.alpha) << "\n"
      << "hlepor.beta = " << format_double(hlepor.beta) << "\n"
      << "hlepor.context = " << hlepor.context << "\n"
      << "hlepor.weight_length = " << format_double(hlepor.weight_length) << "\n"
      << "hlepor.weight_position = " << format_double(hlepor.weight_position) << "\n"
      << "hlepor.weight_fmeasure = " << format_double(hlepor.weight_fmeasure) << "\n";
  return out.str();
}

std::string ExperimentConfig::hash() const {
  // FNV-1a, 64 bit. The output directory is not part of the experiment.
  ExperimentConfig keyed = *this;
  keyed.output_dir.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : keyed.to_string()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    try {
      it->second(config, key, value);
    } catch (const Error& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (config.dev_source.empty()) config.dev_source = config.train_source;
  if (config.dev_refs.empty() && !config.train_target.empty()) {
    config.dev_refs = {config.train_target};
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  auto config = parse_config(in);
  config.resolve_paths(std::filesystem::path(path).parent_path());
  return config;
}

}  // namespace radnmt
