#include "radnmt/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <json.hpp>

#include "radnmt/adadelta.hpp"
#include "radnmt/checkpoint.hpp"
#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

namespace radnmt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDropoutStream = 0x9e3779b97f4a7c15ULL;

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

json score_json(const MetricScore& s) {
  json j;
  j["name"] = s.name;
  j["value"] = s.value;
  j["breakdown"] = s.breakdown;
  j["reference_count"] = s.reference_count;
  j["direction"] = s.direction == Direction::HigherBetter ? "higher-better" : "lower-better";
  j["details"] = s.details;
  return j;
}

json report_json(const EvalReport& r) {
  json j;
  j["lines"] = r.lines;
  j["metrics"] = json::array({score_json(r.bleu), score_json(r.nist), score_json(r.hlepor),
                              score_json(r.character)});
  return j;
}

json ledger_json(const RunLedger& l) {
  json j;
  j["setting"] = l.setting;
  j["config_hash"] = l.config_hash;
  j["records"] = json::array();
  for (const auto& r : l.records) {
    j["records"].push_back({{"update", r.update},
                            {"train_loss", r.train_loss},
                            {"dev_bleu", r.dev_bleu},
                            {"checkpoint", r.checkpoint}});
  }
  j["best"] = l.best ? json(*l.best) : json(nullptr);
  return j;
}

ReferenceSet read_references(const std::vector<std::string>& paths) {
  std::vector<std::vector<Tokens>> corpora;
  for (const auto& p : paths) corpora.push_back(read_tokenized_file(p));
  return ReferenceSet::from_corpora(corpora);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace

// ---------------------------------------------------------------------------
// Ledger and file layout.

std::string RunLedger::to_json() const { return ledger_json(*this).dump(2) + "\n"; }

RunLedger RunLedger::from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    RunLedger l;
    l.setting = j.at("setting").get<std::string>();
    l.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& r : j.at("records")) {
      l.records.push_back({r.at("update").get<std::size_t>(), r.at("train_loss").get<double>(),
                           r.at("dev_bleu").get<double>(), r.at("checkpoint").get<std::string>()});
    }
    if (!j.at("best").is_null()) l.best = j.at("best").get<std::size_t>();
    return l;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ledger: ") + e.what());
  }
}

std::string RunFiles::checkpoint(std::size_t update) const {
  return dir + "/checkpoint-" + std::to_string(update) + ".bin";
}

std::string RunFiles::vocab(const std::string& granularity) const {
  return dir + "/vocab." + granularity + ".txt";
}

// ---------------------------------------------------------------------------
// Model loading and validation.

LoadedModel load_model(const std::string& checkpoint_path) {
  RunFiles files{fs::path(checkpoint_path).parent_path().string()};
  if (files.dir.empty()) files.dir = ".";
  LoadedModel out;
  out.params = load_checkpoint(checkpoint_path);
  out.vocab.words = Vocabulary::load_file(files.vocab("word"));
  out.vocab.characters = Vocabulary::load_file(files.vocab("char"));
  out.vocab.radicals = Vocabulary::load_file(files.vocab("radical"));
  out.vocab.target = Vocabulary::load_file(files.vocab("target"));
  out.table = load_table_file(files.table());
  const auto& d = out.params.dims;
  if (static_cast<std::size_t>(d.word_vocab) != out.vocab.words.size() ||
      static_cast<std::size_t>(d.char_vocab) != out.vocab.characters.size() ||
      static_cast<std::size_t>(d.radical_vocab) != out.vocab.radicals.size() ||
      static_cast<std::size_t>(d.target_vocab) != out.vocab.target.size()) {
    throw ShapeError("vocabulary files do not match the checkpoint in " + files.dir);
  }
  return out;
}

double dev_bleu(const LoadedModel& model, const std::vector<Tokens>& sources,
                const ReferenceSet& refs, int beam, unsigned threads) {
  TranslateOptions options;
  options.beam_width = beam;
  options.threads = threads;
  const auto hyps = translate_sentences(model.translator(), sources, options);
  return bleu(hyps, refs, 4).value;
}

// ---------------------------------------------------------------------------
// Training.

RunLedger train(const ExperimentConfig& config, const ProgressCallback& progress) {
  config.validate();
  const RunFiles files{config.output_dir};
  ensure_directory(files.dir);

  LoadedModel state;
  state.table = load_table_file(config.table);
  const auto corpus = read_parallel_files(config.train_source, config.train_target, config.max_len);
  if (corpus.pairs.empty()) throw InputError("training corpus is empty after length filtering");
  const auto dev_sources = read_tokenized_file(config.dev_source);
  const auto dev_refs = read_references(config.dev_refs);
  if (dev_refs.size() != dev_sources.size()) {
    throw InputError("dev source has " + std::to_string(dev_sources.size()) +
                     " lines but references have " + std::to_string(dev_refs.size()));
  }

  state.vocab = build_vocab(corpus.pairs, state.table, config.vocab);
  write_file_atomic(files.config(), config.to_string());
  {
    std::ostringstream table_text;
    save_table(state.table, table_text);
    write_file_atomic(files.table(), table_text.str());
  }
  state.vocab.words.save_file(files.vocab("word"));
  state.vocab.characters.save_file(files.vocab("char"));
  state.vocab.radicals.save_file(files.vocab("radical"));
  state.vocab.target.save_file(files.vocab("target"));

  ModelDims dims;
  dims.embedding = config.embedding;
  dims.hidden = config.hidden;
  dims.word_vocab = static_cast<int>(state.vocab.words.size());
  dims.char_vocab = static_cast<int>(state.vocab.characters.size());
  dims.radical_vocab = static_cast<int>(state.vocab.radicals.size());
  dims.target_vocab = static_cast<int>(state.vocab.target.size());
  state.params = init_model<float>(config.setting, dims, config.seed);

  RunLedger ledger;
  ledger.setting = std::string(setting_name(config.setting));
  ledger.config_hash = config.hash();

  CheckpointMeta meta{config.seed, ledger.config_hash, std::nullopt, 0};
  save_checkpoint(files.checkpoint(0), state.params);
  save_meta(files.checkpoint(0), meta);
  save_checkpoint(files.model(), state.params);
  save_meta(files.model(), meta);
  write_file_atomic(files.ledger(), ledger.to_json());

  const auto batches =
      encode_batches(corpus.pairs, state.vocab, state.table, config.batch_size);
  AdadeltaState<float> optimizer(state.params, config.rho, config.epsilon);
  auto grads = state.params.zeros_like();
  std::mt19937_64 dropout_rng(config.seed ^ kDropoutStream);
  const DropoutConfig dropout{config.dropout, &dropout_rng};

  for (std::size_t update = 1; update <= config.max_updates; ++update) {
    const auto& batch = batches[(update - 1) % batches.size()];
    const auto loss = batch_gradients(state.params, batch, grads, dropout);
    if (!std::isfinite(loss.mean_loss)) {
      throw NumericError("non-finite loss at update " + std::to_string(update));
    }
    UpdateReport report;
    try {
      report = adadelta_update(optimizer, state.params, grads, config.clip_norm);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at update " + std::to_string(update));
    }

    TrainProgress step{update, loss.mean_loss, report.grad_norm, std::nullopt};
    if (update % config.validate_every == 0 || update == config.max_updates) {
      ValidationRecord record{update, loss.mean_loss,
                              dev_bleu(state, dev_sources, dev_refs, 1, config.threads), ""};
      const bool improved =
          !ledger.best || record.dev_bleu > ledger.records[*ledger.best].dev_bleu;
      if (improved) {
        record.checkpoint = fs::path(files.checkpoint(update)).filename().string();
        meta.dev_bleu = record.dev_bleu;
        meta.update = update;
        save_checkpoint(files.checkpoint(update), state.params);
        save_meta(files.checkpoint(update), meta);
        save_checkpoint(files.model(), state.params);
        save_meta(files.model(), meta);
        ledger.best = ledger.records.size();
      }
      ledger.records.push_back(record);
      write_file_atomic(files.ledger(), ledger.to_json());
      step.dev_bleu = record.dev_bleu;
    }
    if (progress) progress(step);
  }
  return ledger;
}

// ---------------------------------------------------------------------------
// Evaluation.

EvalReport evaluate(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                    const EvalOptions& options, const HleporParams& hlepor_params) {
  EvalReport r;
  r.lines = hypotheses.size();
  r.bleu = bleu(hypotheses, refs, 4, options);
  r.nist = nist(hypotheses, refs, 5, options);
  r.hlepor = per_reference_average(hypotheses, refs, [&](const auto& h, const auto& ref) {
    return hlepor(h, ref, hlepor_params, options);
  });
  r.character = per_reference_average(hypotheses, refs, [&](const auto& h, const auto& ref) {
    return character_score(h, ref, options);
  });
  return r;
}

EvalReport evaluate_files(const std::string& hyp_path, const std::vector<std::string>& ref_paths,
                          const EvalOptions& options, const HleporParams& hlepor_params) {
  if (ref_paths.empty()) throw InputError("at least one reference file is required");
  const auto hyps = read_tokenized_file(hyp_path);
  const auto refs = read_references(ref_paths);
  if (hyps.size() != refs.size()) {
    throw InputError(hyp_path + " has " + std::to_string(hyps.size()) +
                     " lines but references have " + std::to_string(refs.size()));
  }
  return evaluate(hyps, refs, options, hlepor_params);
}

std::string EvalReport::to_json() const { return report_json(*this).dump(2) + "\n"; }

namespace {

std::string table_header(std::size_t label_width) {
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << "" << std::right;
  for (int n = 1; n <= 4; ++n) out << std::setw(9) << ("BLEU-" + std::to_string(n));
  for (int n = 1; n <= 5; ++n) out << std::setw(9) << ("NIST-" + std::to_string(n));
  out << std::setw(9) << "hLEPOR" << std::setw(11) << "CharacTER" << "\n";
  return out.str();
}

std::string table_row(const std::string& label, std::size_t label_width, const EvalReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << label << std::right;
  for (double v : r.bleu.breakdown) out << std::setw(9) << fixed(v);
  for (double v : r.nist.breakdown) out << std::setw(9) << fixed(v);
  out << std::setw(9) << fixed(r.hlepor.value) << std::setw(11) << fixed(r.character.value)
      << "\n";
  return out.str();
}

}  // namespace

std::string EvalReport::to_table(const std::string& label) const {
  const std::size_t width = std::max<std::size_t>(label.size(), 8) + 2;
  return table_header(width) + table_row(label, width, *this);
}

// ---------------------------------------------------------------------------
// Setting matrix.

std::string setting_slug(CompositionSetting setting) {
  std::string out;
  for (char c : setting_name(setting)) {
    if (c != '+') out += c;
  }
  return out;
}

std::size_t MatrixResult::failures() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.error.empty() ? 0 : 1;
  return n;
}

std::string MatrixResult::to_table() const {
  const std::size_t width = 10;
  std::string out = table_header(width);
  for (const auto& row : rows) {
    const std::string label(setting_name(row.setting));
    if (row.report) {
      out += table_row(label, width, *row.report);
    } else {
      std::ostringstream line;
      line << std::left << std::setw(static_cast<int>(width)) << label << "failed: " << row.error
           << "\n";
      out += line.str();
    }
  }
  return out;
}

std::string MatrixResult::to_json() const {
  json j = json::array();
  for (const auto& row : rows) {
    json r;
    r["setting"] = std::string(setting_name(row.setting));
    r["output_dir"] = row.output_dir;
    r["ledger"] = row.ledger ? ledger_json(*row.ledger) : json(nullptr);
    r["report"] = row.report ? report_json(*row.report) : json(nullptr);
    r["error"] = row.error.empty() ? json(nullptr) : json(row.error);
    j.push_back(r);
  }
  return j.dump(2) + "\n";
}

MatrixResult run_matrix(const ExperimentConfig& base, const ProgressCallback& progress) {
  base.validate();
  MatrixResult result;
  for (const auto setting : kAllSettings) {
    MatrixRow row;
    row.setting = setting;
    ExperimentConfig config = base;
    config.setting = setting;
    config.output_dir = (fs::path(base.output_dir) / setting_slug(setting)).string();
    row.output_dir = config.output_dir;
    try {
      row.ledger = train(config, progress);
      const auto model = load_model(RunFiles{config.output_dir}.model());
      TranslateOptions options;
      options.beam_width = config.beam;
      options.threads = config.threads;
      const auto hyps =
          translate_sentences(model.translator(), read_tokenized_file(config.dev_source), options);
      row.report = evaluate(hyps, read_references(config.dev_refs), {}, config.hlepor);
      std::ostringstream hyp_text;
      write_tokenized(hyp_text, hyps);
      write_file_atomic(config.output_dir + "/dev.hyp", hyp_text.str());
      write_file_atomic(config.output_dir + "/report.json", row.report->to_json());
    } catch (const Error& e) {
      row.error = e.error_class() + ": " + e.what();
    } catch (const std::exception& e) {
      row.error = std::string("InternalError: ") + e.what();
    }
    result.rows.push_back(std::move(row));
  }
  ensure_directory(base.output_dir);
  write_file_atomic(base.output_dir + "/matrix.json", result.to_json());
  write_file_atomic(base.output_dir + "/matrix.txt", result.to_table());
  return result;
}

// ---------------------------------------------------------------------------

void write_decompositions(std::ostream& out, const DecompositionTable& table,
                          const std::vector<Tokens>& sentences) {
  const auto join = [](const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i];
    return s;
  };
  for (const auto& sentence : sentences) {
    for (const auto& word : sentence) {
      const auto d = decompose_word(table, word);
      out << d.word << '\t' << join(d.characters) << '\t' << join(d.radicals) << '\t' << d.m()
          << '\t' << d.n() << '\n';
    }
  }
  if (!out) throw IoError("failed writing decompositions");
}

}  // namespace radnmt
