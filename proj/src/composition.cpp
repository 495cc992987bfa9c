#include "radnmt/composition.hpp"

#include "radnmt/error.hpp"

namespace radnmt {

namespace {

template <class Real>
void check_id(const Matrix<Real>& table, int id, const char* what) {
  if (id < 0 || id >= table.rows()) {
    throw InputError(std::string(what) + " id " + std::to_string(id) + " outside table of " +
                     std::to_string(table.rows()) + " rows");
  }
}

}  // namespace

std::string_view setting_name(CompositionSetting s) {
  switch (s) {
    case CompositionSetting::W: return "W";
    case CompositionSetting::WCR: return "W+C+R";
    case CompositionSetting::WC: return "W+C";
    case CompositionSetting::WR: return "W+R";
    case CompositionSetting::CR: return "C+R";
  }
  return "?";
}

CompositionSetting parse_setting(std::string_view name) {
  for (const auto s : kAllSettings) {
    if (setting_name(s) == name) return s;
  }
  throw ConfigError("unknown composition setting \"" + std::string(name) +
                    "\" (expected W, W+C+R, W+C, W+R or C+R)");
}

CompositionSetting setting_from_code(std::uint8_t code) {
  if (code >= kAllSettings.size()) {
    throw ConfigError("invalid composition setting code " + std::to_string(code));
  }
  return static_cast<CompositionSetting>(code);
}

int input_dim(CompositionSetting setting, int d) {
  if (d < 1) throw ConfigError("embedding width must be positive");
  return d * active_parts(setting);
}

template <class Real>
Vector<Real> compose_token(CompositionSetting setting, const EncodedToken& token,
                           const EmbeddingTables<Real>& tables) {
  const int d = tables.width();
  Vector<Real> out(input_dim(setting, d));
  Eigen::Index offset = 0;
  if (uses_word(setting)) {
    check_id(tables.word, token.word, "word");
    out.segment(offset, d) = tables.word.row(token.word).transpose();
    offset += d;
  }
  if (uses_char(setting)) {
    auto slice = out.segment(offset, d);
    slice.setZero();
    for (const int id : token.characters) {
      check_id(tables.character, id, "character");
      slice += tables.character.row(id).transpose();
    }
    offset += d;
  }
  if (uses_radical(setting)) {
    auto slice = out.segment(offset, d);
    slice.setZero();
    for (const int id : token.radicals) {
      check_id(tables.radical, id, "radical");
      slice += tables.radical.row(id).transpose();
    }
  }
  return out;
}

template <class Real>
Matrix<Real> compose_source(CompositionSetting setting, const EncodedSource& source,
                            const EmbeddingTables<Real>& tables) {
  Matrix<Real> out(static_cast<Eigen::Index>(source.size()), input_dim(setting, tables.width()));
  for (std::size_t j = 0; j < source.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = compose_token(setting, source[j], tables).transpose();
  }
  return out;
}

template <class Real>
ComposedBatch<Real> compose_batch(CompositionSetting setting, const EncodedBatch& batch,
                                  const EmbeddingTables<Real>& tables) {
  ComposedBatch<Real> out;
  out.mask = batch.source_mask;
  const int width = input_dim(setting, tables.width());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& row = batch.source[i];
    Matrix<Real> inputs = Matrix<Real>::Zero(static_cast<Eigen::Index>(row.size()), width);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!batch.source_mask[i][j]) continue;
      inputs.row(static_cast<Eigen::Index>(j)) = compose_token(setting, row[j], tables).transpose();
    }
    out.inputs.push_back(std::move(inputs));
  }
  return out;
}

template <class Real>
void accumulate_token_gradient(CompositionSetting setting, const EncodedToken& token,
                               const Eigen::Ref<const Vector<Real>>& grad,
                               EmbeddingTables<Real>& table_grads) {
  const int d = table_grads.width();
  Eigen::Index offset = 0;
  if (uses_word(setting)) {
    table_grads.word.row(token.word) += grad.segment(offset, d).transpose();
    offset += d;
  }
  if (uses_char(setting)) {
    for (const int id : token.characters) {
      table_grads.character.row(id) += grad.segment(offset, d).transpose();
    }
    offset += d;
  }
  if (uses_radical(setting)) {
    for (const int id : token.radicals) {
      table_grads.radical.row(id) += grad.segment(offset, d).transpose();
    }
  }
}

template Vector<float> compose_token(CompositionSetting, const EncodedToken&,
                                     const EmbeddingTables<float>&);
template Vector<double> compose_token(CompositionSetting, const EncodedToken&,
                                      const EmbeddingTables<double>&);
template Matrix<float> compose_source(CompositionSetting, const EncodedSource&,
                                      const EmbeddingTables<float>&);
template Matrix<double> compose_source(CompositionSetting, const EncodedSource&,
                                       const EmbeddingTables<double>&);
template ComposedBatch<float> compose_batch(CompositionSetting, const EncodedBatch&,
                                            const EmbeddingTables<float>&);
template ComposedBatch<double> compose_batch(CompositionSetting, const EncodedBatch&,
                                             const EmbeddingTables<double>&);
template void accumulate_token_gradient(CompositionSetting, const EncodedToken&,
                                        const Eigen::Ref<const Vector<float>>&,
                                        EmbeddingTables<float>&);
template void accumulate_token_gradient(CompositionSetting, const EncodedToken&,
                                        const Eigen::Ref<const Vector<double>>&,
                                        EmbeddingTables<double>&);

}  // namespace radnmt
