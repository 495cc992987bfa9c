#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "radnmt/composition.hpp"
#include "radnmt/error.hpp"

using namespace radnmt;
using namespace radnmt::testing;

namespace {

EmbeddingTables<double> random_tables(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmbeddingTables<double> t;
  t.word = Matrix<double>::NullaryExpr(10, d, [&] { return u(rng); });
  t.character = Matrix<double>::NullaryExpr(10, d, [&] { return u(rng); });
  t.radical = Matrix<double>::NullaryExpr(10, d, [&] { return u(rng); });
  return t;
}

EncodedToken token(int word, std::vector<int> chars, std::vector<int> rads) {
  EncodedToken t;
  t.word = word;
  t.characters = std::move(chars);
  t.radicals = std::move(rads);
  return t;
}

}  // namespace

TEST_CASE("settings and input widths") {
  CHECK(input_dim(CompositionSetting::WCR, 620) == 1860);
  CHECK(input_dim(CompositionSetting::W, 620) == 620);
  CHECK(input_dim(CompositionSetting::CR, 64) == 128);
  CHECK(input_dim(CompositionSetting::WC, 5) == 10);
  CHECK(input_dim(CompositionSetting::WR, 5) == 10);
  CHECK_THROWS_AS(input_dim(CompositionSetting::W, 0), ConfigError);
  for (auto s : kAllSettings) {
    CHECK(active_parts(s) == int{uses_word(s)} + int{uses_char(s)} + int{uses_radical(s)});
    CHECK(parse_setting(setting_name(s)) == s);
    CHECK(setting_from_code(static_cast<std::uint8_t>(s)) == s);
  }
  CHECK(setting_name(kAllSettings[0]) == "W");
  CHECK(setting_name(kAllSettings[1]) == "W+C+R");
  CHECK(setting_name(kAllSettings[4]) == "C+R");
  CHECK_THROWS_AS(parse_setting("C"), ConfigError);
  CHECK_THROWS_AS(setting_from_code(9), ConfigError);
}

TEST_CASE("single-part sums are the rows themselves") {
  const auto t = random_tables(4, 1);
  const auto x = compose_token(CompositionSetting::WCR, token(5, {6}, {7}), t);
  REQUIRE(x.size() == 12);
  CHECK(x.segment(0, 4) == t.word.row(5).transpose());
  CHECK(x.segment(4, 4) == t.character.row(6).transpose());
  CHECK(x.segment(8, 4) == t.radical.row(7).transpose());
}

TEST_CASE("character part is the sum of fixed rows") {
  EmbeddingTables<double> t;
  t.word = Matrix<double>::Zero(10, 3);
  t.character = Matrix<double>::Zero(10, 3);
  t.radical = Matrix<double>::Zero(10, 3);
  t.character.row(4) << 0.5, -1.0, 2.0;
  t.character.row(7) << 0.25, 3.0, -2.0;
  const auto x = compose_token(CompositionSetting::WC, token(1, {4, 7}, {1}), t);
  CHECK(x(3) == 0.75);
  CHECK(x(4) == 2.0);
  CHECK(x(5) == 0.0);
}

TEST_CASE("W ignores character and radical ids") {
  const auto t = random_tables(4, 2);
  const auto a = compose_token(CompositionSetting::W, token(3, {1, 2}, {4}), t);
  const auto b = compose_token(CompositionSetting::W, token(3, {8}, {9, 9, 2}), t);
  CHECK(a == b);
  CHECK(a == t.word.row(3).transpose());
}

TEST_CASE("summation is order-free and zero rows contribute nothing") {
  auto t = random_tables(4, 3);
  const auto a = compose_token(CompositionSetting::CR, token(0, {1, 2, 3}, {4, 5}), t);
  const auto b = compose_token(CompositionSetting::CR, token(0, {3, 1, 2}, {5, 4}), t);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15);
  t.character.row(9).setZero();
  const auto c = compose_token(CompositionSetting::CR, token(0, {1, 2, 3, 9}, {4, 5}), t);
  CHECK(c == a);
}

TEST_CASE("word part is identical across settings that use it") {
  const auto t = random_tables(4, 4);
  const auto tok = token(2, {3, 4}, {5, 6, 7});
  const auto wcr = compose_token(CompositionSetting::WCR, tok, t);
  const auto wc = compose_token(CompositionSetting::WC, tok, t);
  const auto wr = compose_token(CompositionSetting::WR, tok, t);
  CHECK(wcr.head(4) == wc.head(4));
  CHECK(wcr.head(4) == wr.head(4));
  CHECK(wcr.head(8) == wc);
  CHECK(wr.tail(4) == wcr.tail(4));
}

TEST_CASE("out-of-range ids are rejected") {
  const auto t = random_tables(4, 5);
  CHECK_THROWS_AS(compose_token(CompositionSetting::W, token(10, {1}, {1}), t), InputError);
  CHECK_THROWS_AS(compose_token(CompositionSetting::WC, token(1, {-1}, {1}), t), InputError);
  CHECK_THROWS_AS(compose_token(CompositionSetting::CR, token(1, {1}, {12}), t), InputError);
}

TEST_CASE("batch composition zeroes padding and reports masks") {
  const auto t = random_tables(4, 6);
  EncodedSource two{token(4, {5}, {6}), token(5, {6}, {7})};
  EncodedSource three{token(4, {5}, {6}), token(5, {6}, {7}), token(6, {7}, {8})};
  const auto batch = make_batch({two, three}, {{kEosId}, {kEosId}});
  const auto wcr = compose_batch(CompositionSetting::WCR, batch, t);
  CHECK(wcr.mask[0] == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(wcr.mask[1] == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(wcr.inputs[0].row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(wcr.inputs[0].cols() == 12);
  const auto wc = compose_batch(CompositionSetting::WC, batch, t);
  CHECK(wc.inputs[1].cols() == 8);
  CHECK(wc.inputs[1] == wcr.inputs[1].leftCols(8));

  const auto single = make_batch({three}, {{kEosId}});
  CHECK(compose_batch(CompositionSetting::W, single, t).mask[0] == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("token gradients are scattered to every contributing row") {
  const auto t = random_tables(2, 7);
  EmbeddingTables<double> g;
  g.word = Matrix<double>::Zero(10, 2);
  g.character = Matrix<double>::Zero(10, 2);
  g.radical = Matrix<double>::Zero(10, 2);
  Vector<double> grad(6);
  grad << 1, 2, 3, 4, 5, 6;
  accumulate_token_gradient<double>(CompositionSetting::WCR, token(1, {2, 2, 3}, {4}), grad, g);
  CHECK(g.word(1, 1) == 2.0);
  CHECK(g.character(2, 0) == 6.0);
  CHECK(g.character(3, 1) == 4.0);
  CHECK(g.radical(4, 0) == 5.0);
  CHECK(g.word.sum() + g.character.sum() + g.radical.sum() == 3.0 + 7.0 * 3.0 + 11.0);
}
