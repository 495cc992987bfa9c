#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "radnmt/config.hpp"
#include "radnmt/corpus.hpp"
#include "radnmt/decode.hpp"
#include "radnmt/decomposition.hpp"
#include "radnmt/metrics.hpp"
#include "radnmt/model.hpp"

namespace radnmt {

struct ValidationRecord {
  std::size_t update = 0;
  double train_loss = 0.0;  // mean loss of the batch that produced this update
  double dev_bleu = 0.0;
  std::string checkpoint;  // empty unless this validation improved on the best

  bool operator==(const ValidationRecord&) const = default;
};

/// Validation history of one training run. `best` indexes the record with
/// the highest dev BLEU; the earliest record wins ties.
struct RunLedger {
  std::string setting;
  std::string config_hash;
  std::vector<ValidationRecord> records;
  std::optional<std::size_t> best;

  bool operator==(const RunLedger&) const = default;

  std::string to_json() const;
  static RunLedger from_json(const std::string& text);
};

/// Output-directory layout shared by train and translate.
struct RunFiles {
  std::string dir;

  std::string model() const { return dir + "/model.bin"; }
  std::string checkpoint(std::size_t update) const;
  std::string ledger() const { return dir + "/ledger.json"; }
  std::string config() const { return dir + "/config.txt"; }
  std::string table() const { return dir + "/table.tsv"; }
  std::string vocab(const std::string& granularity) const;
};

struct TrainProgress {
  std::size_t update = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> dev_bleu;  // set on validation updates
};

using ProgressCallback = std::function<void(const TrainProgress&)>;

/// Builds vocabularies, trains with Adadelta, validates every
/// `validate_every` updates (and after the last) by greedy decoding the dev
/// set and scoring BLEU-4, and checkpoints on strict improvement. Writes
/// config.txt, table.tsv, vocab.*.txt, checkpoint-<update>.bin, model.bin
/// (best so far; the initial model until a validation happens) and
/// ledger.json into `output_dir`. Throws NumericError naming the update on a
/// non-finite loss or gradient.
RunLedger train(const ExperimentConfig& config, const ProgressCallback& progress = {});

/// A trained model with its vocabularies and decomposition table.
struct LoadedModel {
  ModelParams<float> params;
  GranularVocabulary vocab;
  DecompositionTable table;

  Translator translator() const { return {params, vocab, table}; }
};

/// Loads a checkpoint together with the vocab.*.txt and table.tsv files found
/// next to it.
LoadedModel load_model(const std::string& checkpoint_path);

/// Greedy or beam translation of the dev set followed by BLEU-4.
double dev_bleu(const LoadedModel& model, const std::vector<Tokens>& sources,
                const ReferenceSet& refs, int beam, unsigned threads);

/// The four metrics of one hypothesis corpus. hLEPOR and CharacTER are
/// scored per reference and averaged; BLEU and NIST use all references at
/// once.
struct EvalReport {
  MetricScore bleu;
  MetricScore nist;
  MetricScore hlepor;
  MetricScore character;
  std::size_t lines = 0;

  std::string to_json() const;
  /// Aligned text table with BLEU 1-4 and NIST 1-5 columns.
  std::string to_table(const std::string& label = "system") const;
};

EvalReport evaluate(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                    const EvalOptions& options = {}, const HleporParams& hlepor_params = {});

/// Reads the hypothesis file and every reference file; throws InputError if
/// the line counts differ.
EvalReport evaluate_files(const std::string& hyp_path, const std::vector<std::string>& ref_paths,
                          const EvalOptions& options = {}, const HleporParams& hlepor_params = {});

struct MatrixRow {
  CompositionSetting setting = CompositionSetting::W;
  std::string output_dir;
  std::optional<RunLedger> ledger;
  std::optional<EvalReport> report;  // dev set decoded with the configured beam
  std::string error;                  // "<ErrorClass>: message" when the run failed
};

struct MatrixResult {
  std::vector<MatrixRow> rows;  // W, W+C+R, W+C, W+R, C+R

  std::size_t failures() const;
  std::string to_table() const;
  std::string to_json() const;
};

/// Runs the five settings with otherwise identical configs, each in
/// `<output_dir>/<setting>`. A failing run is recorded and the rest continue.
MatrixResult run_matrix(const ExperimentConfig& base, const ProgressCallback& progress = {});

/// Directory-safe setting name: W, WCR, WC, WR, CR.
std::string setting_slug(CompositionSetting setting);

/// Tab-separated debug view: word, characters, radicals, m, n.
void write_decompositions(std::ostream& out, const DecompositionTable& table,
                          const std::vector<Tokens>& sentences);

}  // namespace radnmt
