#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "radnmt/composition.hpp"
#include "radnmt/config.hpp"
#include "radnmt/decode.hpp"
#include "radnmt/decomposition.hpp"
#include "radnmt/error.hpp"
#include "radnmt/harness.hpp"
#include "radnmt/metrics.hpp"
#include "radnmt/utf8.hpp"

namespace py = pybind11;
using namespace radnmt;

namespace {

std::vector<Tokens> tokenize(const std::vector<std::string>& lines) {
  std::vector<Tokens> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(utf8::split_tokens(line));
  return out;
}

std::vector<std::string> detokenize(const std::vector<Tokens>& sentences) {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& tokens : sentences) {
    std::string line;
    for (const auto& t : tokens) {
      if (!line.empty()) line += ' ';
      line += t;
    }
    out.push_back(std::move(line));
  }
  return out;
}

ReferenceSet references(const std::vector<std::vector<std::string>>& corpora) {
  std::vector<std::vector<Tokens>> tokenized;
  for (const auto& corpus : corpora) tokenized.push_back(tokenize(corpus));
  return ReferenceSet::from_corpora(tokenized);
}

ExperimentConfig config_from(const std::string& path, const std::optional<std::string>& output_dir) {
  auto config = load_config_file(path);
  if (output_dir) config.output_dir = *output_dir;
  return config;
}

ProgressCallback wrap(const std::optional<py::function>& callback) {
  if (!callback) return {};
  return [fn = *callback](const TrainProgress& p) {
    py::gil_scoped_acquire gil;
    py::dict d;
    d["update"] = p.update;
    d["loss"] = p.loss;
    d["grad_norm"] = p.grad_norm;
    d["dev_bleu"] = p.dev_bleu ? py::cast(*p.dev_bleu) : py::none();
    fn(d);
  };
}

}  // namespace

PYBIND11_MODULE(_radnmt, m) {
  static py::exception<Error> error(m, "RadnmtError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (e.error_class() + ": " + e.what()).c_str());
    }
  });

  m.def("settings", [] {
    std::vector<std::string> names;
    for (auto s : kAllSettings) names.emplace_back(setting_name(s));
    return names;
  });
  m.def("input_dim", [](const std::string& setting, int d) { return input_dim(parse_setting(setting), d); },
        py::arg("setting"), py::arg("d"));

  py::class_<DecompositionTable>(m, "DecompositionTable")
      .def_static("load", &load_table_file, py::arg("path"))
      .def("__len__", &DecompositionTable::size)
      .def("decompose_char",
           [](const DecompositionTable& t, const std::string& ch) { return decompose_char(t, ch); })
      .def("decompose_word", [](const DecompositionTable& t, const std::string& word) {
        const auto w = decompose_word(t, word);
        return py::make_tuple(w.characters, w.radicals);
      });

  py::class_<MetricScore>(m, "MetricScore")
      .def_readonly("name", &MetricScore::name)
      .def_readonly("value", &MetricScore::value)
      .def_readonly("breakdown", &MetricScore::breakdown)
      .def_readonly("reference_count", &MetricScore::reference_count)
      .def_readonly("details", &MetricScore::details)
      .def_property_readonly("lower_is_better",
                             [](const MetricScore& s) { return s.direction == Direction::LowerBetter; })
      .def("__repr__", [](const MetricScore& s) {
        return "<MetricScore " + s.name + "=" + std::to_string(s.value) + ">";
      });

  m.def(
      "bleu",
      [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs, int max_n,
         bool case_insensitive) { return bleu(tokenize(hyps), references(refs), max_n, {case_insensitive}); },
      py::arg("hypotheses"), py::arg("references"), py::arg("max_n") = 4, py::arg("case_insensitive") = false);
  m.def(
      "nist",
      [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs, int max_n,
         bool case_insensitive) { return nist(tokenize(hyps), references(refs), max_n, {case_insensitive}); },
      py::arg("hypotheses"), py::arg("references"), py::arg("max_n") = 5, py::arg("case_insensitive") = false);
  m.def(
      "evaluate",
      [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs,
         bool case_insensitive) { return evaluate(tokenize(hyps), references(refs), {case_insensitive}).to_json(); },
      py::arg("hypotheses"), py::arg("references"), py::arg("case_insensitive") = false);
  m.def("character_sentence", [](const std::string& hyp, const std::string& ref) {
    return character_sentence(utf8::split_tokens(hyp), utf8::split_tokens(ref));
  });
  m.def("hlepor_sentence", [](const std::string& hyp, const std::string& ref) {
    return hlepor_sentence(utf8::split_tokens(hyp), utf8::split_tokens(ref)).score;
  });

  m.def(
      "train",
      [](const std::string& config_path, const std::optional<std::string>& output_dir,
         const std::optional<py::function>& progress) {
        const auto config = config_from(config_path, output_dir);
        const auto callback = wrap(progress);
        py::gil_scoped_release release;
        return train(config, callback).to_json();
      },
      py::arg("config"), py::arg("output_dir") = py::none(), py::arg("progress") = py::none());
  m.def(
      "run_matrix",
      [](const std::string& config_path, const std::optional<std::string>& output_dir) {
        const auto config = config_from(config_path, output_dir);
        py::gil_scoped_release release;
        return run_matrix(config).to_json();
      },
      py::arg("config"), py::arg("output_dir") = py::none());
  m.def(
      "translate",
      [](const std::string& model_path, const std::vector<std::string>& lines, int beam, int max_len,
         unsigned threads) {
        const auto sources = tokenize(lines);
        py::gil_scoped_release release;
        const auto model = load_model(model_path);
        return detokenize(translate_sentences(model.translator(), sources, {beam, max_len, threads}));
      },
      py::arg("model"), py::arg("sentences"), py::arg("beam") = 10, py::arg("max_len") = 0,
      py::arg("threads") = 1);
}
