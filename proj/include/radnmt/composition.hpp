#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "radnmt/corpus.hpp"
#include "radnmt/tensor.hpp"

namespace radnmt {

/// Which source sub-embeddings are concatenated into the encoder input.
enum class CompositionSetting : std::uint8_t {
  W = 0,    // word only (baseline)
  WCR = 1,  // word + character + radical
  WC = 2,
  WR = 3,
  CR = 4,   // character + radical; positions stay word-segmented
};

/// Experiment-table order.
inline constexpr std::array<CompositionSetting, 5> kAllSettings = {
    CompositionSetting::W, CompositionSetting::WCR, CompositionSetting::WC,
    CompositionSetting::WR, CompositionSetting::CR};

constexpr bool uses_word(CompositionSetting s) {
  return s == CompositionSetting::W || s == CompositionSetting::WCR ||
         s == CompositionSetting::WC || s == CompositionSetting::WR;
}
constexpr bool uses_char(CompositionSetting s) {
  return s == CompositionSetting::WCR || s == CompositionSetting::WC ||
         s == CompositionSetting::CR;
}
constexpr bool uses_radical(CompositionSetting s) {
  return s == CompositionSetting::WCR || s == CompositionSetting::WR ||
         s == CompositionSetting::CR;
}
constexpr int active_parts(CompositionSetting s) {
  return int{uses_word(s)} + int{uses_char(s)} + int{uses_radical(s)};
}

/// "W", "W+C+R", "W+C", "W+R", "C+R".
std::string_view setting_name(CompositionSetting s);
/// Accepts the names above; throws ConfigError otherwise.
CompositionSetting parse_setting(std::string_view name);
/// Throws ConfigError for bytes that are not one of the five settings.
CompositionSetting setting_from_code(std::uint8_t code);

/// Width of x_j = [w_j; z_j; r_j] restricted to the active parts.
int input_dim(CompositionSetting setting, int d);

/// Source embeddings. All three tables have width d; rows are vocabulary ids.
template <class Real>
struct EmbeddingTables {
  Matrix<Real> word;
  Matrix<Real> character;
  Matrix<Real> radical;

  int width() const { return static_cast<int>(word.cols()); }
};

/// Concatenates, in word -> char -> radical order, the active parts of one
/// token: the word row, the sum of its character rows and the sum of its
/// radical rows. Throws InputError on an out-of-range id.
template <class Real>
Vector<Real> compose_token(CompositionSetting setting, const EncodedToken& token,
                           const EmbeddingTables<Real>& tables);

/// One row per position of a sentence.
template <class Real>
Matrix<Real> compose_source(CompositionSetting setting, const EncodedSource& source,
                            const EmbeddingTables<Real>& tables);

template <class Real>
struct ComposedBatch {
  std::vector<Matrix<Real>> inputs;  // per sentence, padded rows are zero
  std::vector<std::vector<std::uint8_t>> mask;
};

template <class Real>
ComposedBatch<Real> compose_batch(CompositionSetting setting, const EncodedBatch& batch,
                                  const EmbeddingTables<Real>& tables);

/// Adds the gradient of one composed vector back into the table gradients:
/// the word slice to the word row, the char slice to every char row, the
/// radical slice to every radical row.
template <class Real>
void accumulate_token_gradient(CompositionSetting setting, const EncodedToken& token,
                               const Eigen::Ref<const Vector<Real>>& grad,
                               EmbeddingTables<Real>& table_grads);

extern template Vector<float> compose_token(CompositionSetting, const EncodedToken&,
                                            const EmbeddingTables<float>&);
extern template Vector<double> compose_token(CompositionSetting, const EncodedToken&,
                                             const EmbeddingTables<double>&);
extern template Matrix<float> compose_source(CompositionSetting, const EncodedSource&,
                                             const EmbeddingTables<float>&);
extern template Matrix<double> compose_source(CompositionSetting, const EncodedSource&,
                                              const EmbeddingTables<double>&);
extern template ComposedBatch<float> compose_batch(CompositionSetting, const EncodedBatch&,
                                                   const EmbeddingTables<float>&);
extern template ComposedBatch<double> compose_batch(CompositionSetting, const EncodedBatch&,
                                                    const EmbeddingTables<double>&);
extern template void accumulate_token_gradient(CompositionSetting, const EncodedToken&,
                                               const Eigen::Ref<const Vector<float>>&,
                                               EmbeddingTables<float>&);
extern template void accumulate_token_gradient(CompositionSetting, const EncodedToken&,
                                               const Eigen::Ref<const Vector<double>>&,
                                               EmbeddingTables<double>&);

}  // namespace radnmt
