#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"
#include "radnmt/decomposition.hpp"
#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

using namespace radnmt;
using namespace radnmt::testing;

namespace {

DecompositionTable table_from(const std::string& text) {
  std::istringstream in(text);
  return load_table(in);
}

bool contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

const DecompositionTable& fixture() {
  static const auto table = load_table_file(data_path("decomposition.tsv"));
  return table;
}

}  // namespace

TEST_CASE("utf8 scalar splitting") {
  CHECK(utf8::split_scalars("a木𝄞") == std::vector<std::string>{"a", "木", "𝄞"});
  CHECK(utf8::scalar_count("森林") == 2);
  CHECK(utf8::is_single_scalar("艹"));
  CHECK_FALSE(utf8::is_single_scalar("木木"));
  CHECK_FALSE(utf8::is_single_scalar(""));
  CHECK_FALSE(utf8::is_valid("\xC0\xAF"));          // overlong
  CHECK_FALSE(utf8::is_valid("\xED\xA0\x80"));      // surrogate
  CHECK_FALSE(utf8::is_valid("\xF4\x90\x80\x80"));  // above U+10FFFF
  CHECK_FALSE(utf8::is_valid("\xE6\x9C"));          // truncated
  CHECK_THROWS_AS(utf8::split_scalars("\xFF"), InputError);
  CHECK(utf8::split_tokens("  a\tb  c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(utf8::ascii_lower("ABC木d") == "abc木d");
}

TEST_CASE("load_table parses entries and skips comments") {
  const auto t = table_from("# version: test-1\n\n木\t木\n森\t木 木 木\n");
  CHECK(t.size() == 2);
  CHECK(t.version() == "test-1");
  CHECK(*t.find("森") == std::vector<std::string>{"木", "木", "木"});
}

TEST_CASE("duplicate keys keep the last entry and are counted") {
  const auto t = table_from("林\t木\n林\t木 木\n");
  CHECK(t.size() == 1);
  CHECK(t.duplicate_count() == 1);
  CHECK(*t.find("林") == std::vector<std::string>{"木", "木"});
}

TEST_CASE("multi-scalar components are split") {
  const auto t = table_from("森\t木 木木\n");
  CHECK(*t.find("森") == std::vector<std::string>{"木", "木", "木"});
}

TEST_CASE("malformed tables name the line") {
  const auto message = [](const std::string& text) {
    try {
      table_from(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("木\t木\n森 木\n").find("line 2") != std::string::npos);
  CHECK(message("木\t木\t木\n").find("line 1") != std::string::npos);
  CHECK(message("木木\t木\n").find("line 1") != std::string::npos);
  CHECK(message("木\t\n").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(table_from(""), ParseError);
  CHECK_THROWS_AS(table_from("# only a comment\n"), ParseError);
  CHECK_THROWS_AS(load_table_file("/nonexistent/table.tsv"), IoError);
}

TEST_CASE("fixture entry count equals its data line count") {
  std::ifstream in(data_path("decomposition.tsv"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++lines;
  }
  CHECK(fixture().size() == lines);
  CHECK(fixture().size() >= 50);
}

TEST_CASE("shared radicals of the fixture characters") {
  for (const char* c : {"森", "树", "桥"}) CHECK(contains(decompose_char(fixture(), c), "木"));
  for (const char* c : {"草", "药", "茶"}) CHECK(contains(decompose_char(fixture(), c), "艹"));
}

TEST_CASE("decompose_char falls back to identity") {
  CHECK(decompose_char(fixture(), "A") == std::vector<std::string>{"A"});
  CHECK(decompose_char(fixture(), "天") == std::vector<std::string>{"天"});
}

TEST_CASE("decompose_word concatenates character entries") {
  const auto d = decompose_word(fixture(), "森林");
  CHECK(d.characters == std::vector<std::string>{"森", "林"});
  auto expected = *fixture().find("森");
  const auto& second = *fixture().find("林");
  expected.insert(expected.end(), second.begin(), second.end());
  CHECK(d.radicals == expected);
  CHECK(d.m() == 2);
  CHECK(d.n() == fixture().find("森")->size() + second.size());

  const auto herb = decompose_word(fixture(), "草药");
  CHECK(std::count(herb.radicals.begin(), herb.radicals.end(), "艹") >= 2);

  const auto unknown = decompose_word(fixture(), "天");
  CHECK(unknown.characters == std::vector<std::string>{"天"});
  CHECK(unknown.radicals == std::vector<std::string>{"天"});
  CHECK(unknown.m() == 1);
  CHECK(unknown.n() == 1);

  CHECK_THROWS_AS(decompose_word(fixture(), ""), InputError);
}

TEST_CASE("reconstruction and determinism") {
  for (const char* w : {"我们", "森林", "A木b", "天气", "苹果树"}) {
    const auto d = decompose_word(fixture(), w);
    std::string joined;
    for (const auto& c : d.characters) joined += c;
    CHECK(joined == w);
    CHECK(d.n() >= d.m());
    CHECK(decompose_word(fixture(), w).radicals == d.radicals);
  }
}

TEST_CASE("save_table round trip") {
  std::ostringstream out;
  save_table(fixture(), out);
  const auto again = table_from(out.str());
  CHECK(again.entries() == fixture().entries());
  CHECK(again.version() == fixture().version());
}
