// radnmt command-line tool: train, translate, evaluate, matrix, decompose.
//
// Failures print exactly one line "<ErrorClass>: <message>" to stderr and exit
// nonzero (1 for runtime errors, 2 for usage errors).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "radnmt/checkpoint.hpp"
#include "radnmt/error.hpp"
#include "radnmt/harness.hpp"
#include "radnmt/utf8.hpp"

using namespace radnmt;

namespace {

std::vector<std::string> split_commas(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ProgressCallback stderr_progress(bool quiet) {
  if (quiet) return {};
  return [](const TrainProgress& p) {
    if (!p.dev_bleu) return;
    std::cerr << "update " << p.update << "  loss " << p.loss << "  grad_norm " << p.grad_norm
              << "  dev_bleu " << *p.dev_bleu << "\n";
  };
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_file_atomic(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-granularity attention NMT toolkit"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  bool quiet = false;
  auto* train_cmd = app.add_subcommand("train", "Train one model from a config file");
  train_cmd->add_option("--config", config_path, "Experiment config")->required();
  train_cmd->add_option("--output-dir", output_dir, "Override output_dir from the config");
  train_cmd->add_flag("--quiet", quiet, "No progress on stderr");

  std::string model_path, input_path, output_path;
  int beam = 10;
  int max_len = 0;
  unsigned threads = 1;
  auto* translate_cmd = app.add_subcommand("translate", "Translate a tokenized source file");
  translate_cmd->add_option("--model", model_path, "Checkpoint (vocab/table files beside it)")
      ->required();
  translate_cmd->add_option("--input", input_path, "Source file, one sentence per line")
      ->required();
  translate_cmd->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  translate_cmd->add_option("--max-len", max_len, "Maximum output length (0: 2*len+5, max 100)")
      ->check(CLI::NonNegativeNumber);
  translate_cmd->add_option("--output", output_path, "Output file (default stdout)");
  translate_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string hyp_path, refs_list, json_path;
  bool case_insensitive = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a hypothesis file");
  evaluate_cmd->add_option("--hyp", hyp_path, "Hypothesis file")->required();
  evaluate_cmd->add_option("--refs", refs_list, "Comma-separated reference files")->required();
  evaluate_cmd->add_flag("--case-insensitive", case_insensitive, "Lowercase ASCII before scoring");
  evaluate_cmd->add_option("--json", json_path, "Also write the JSON report here");

  auto* matrix_cmd = app.add_subcommand("matrix", "Train and score all five settings");
  matrix_cmd->add_option("--config", config_path, "Base experiment config")->required();
  matrix_cmd->add_option("--output-dir", output_dir, "Override output_dir from the config");
  matrix_cmd->add_flag("--quiet", quiet, "No progress on stderr");

  std::string table_path;
  auto* decompose_cmd = app.add_subcommand("decompose", "Show word decompositions");
  decompose_cmd->add_option("--table", table_path, "Decomposition table")->required();
  decompose_cmd->add_option("--input", input_path, "Tokenized text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (auto& c : message) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "UsageError: " << message << "\n";
    return 2;
  }

  try {
    if (*train_cmd || *matrix_cmd) {
      auto config = load_config_file(config_path);
      if (!output_dir.empty()) config.output_dir = output_dir;
      if (*train_cmd) {
        const auto ledger = train(config, stderr_progress(quiet));
        std::cout << ledger.to_json();
      } else {
        const auto result = run_matrix(config, stderr_progress(quiet));
        std::cout << result.to_table();
        if (result.failures() > 0) {
          std::cerr << "MatrixError: " << result.failures() << " of " << result.rows.size()
                    << " runs failed\n";
          return 1;
        }
      }
    } else if (*translate_cmd) {
      const auto model = load_model(model_path);
      TranslateOptions options;
      options.beam_width = beam;
      options.max_len = max_len;
      options.threads = threads;
      const auto hyps = translate_sentences(model.translator(), read_tokenized_file(input_path),
                                            options);
      std::ostringstream text;
      write_tokenized(text, hyps);
      write_output(output_path, text.str());
    } else if (*evaluate_cmd) {
      const auto report =
          evaluate_files(hyp_path, split_commas(refs_list), EvalOptions{case_insensitive});
      std::cout << report.to_table();
      if (!json_path.empty()) write_file_atomic(json_path, report.to_json());
    } else if (*decompose_cmd) {
      const auto table = load_table_file(table_path);
      write_decompositions(std::cout, table, read_tokenized_file(input_path));
    }
  } catch (const Error& e) {
    std::cerr << e.error_class() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
