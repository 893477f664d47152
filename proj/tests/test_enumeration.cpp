#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "overspec/enumeration.hpp"
#include "overspec/errors.hpp"
#include "support.hpp"

using namespace overspec;

namespace {

// Brute-force generation of every canonical program up to max_len by
// length, directly from the grammar.
std::vector<std::vector<std::string>> naive_terms(const std::string& lit_chars,
                                                  std::size_t max_len) {
  std::vector<std::vector<std::string>> by_len(max_len + 1);
  auto put = [&](std::string s) {
    if (s.size() <= max_len) by_len[s.size()].push_back(std::move(s));
  };
  // literals up to the longest that could fit
  std::vector<std::string> lits{""};
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (lits[i].size() + 8 >= max_len) continue;
    for (char c : lit_chars) lits.push_back(lits[i] + c);
  }
  for (const char* leaf : {"INPUT", "FIRST", "SECOND"}) put(leaf);
  for (const auto& l : lits) {
    put("(CONST " + l + ")");
    put("(MATCH_PAD " + l + ")");
    put("(PAD_COUNT " + l + ")");
  }
  for (std::uint64_t n = 0; n < 100000; ++n) put("(NUM " + std::to_string(n) + ")");
  const std::vector<std::string> binary = {"CONCAT", "EQ", "EVAL", "SPECIALIZE"};
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (const auto& kw : binary) {
      const std::size_t frame = kw.size() + 4;
      if (len < frame) continue;
      for (std::size_t la = 1; la + frame < len; ++la) {
        const std::size_t lb = len - frame - la;
        for (const auto& a : by_len[la])
          for (const auto& b : by_len[lb]) put("(" + kw + " " + a + " " + b + ")");
      }
    }
    if (len > 5) {
      for (const auto& a : by_len[len - 5]) put("(SQ " + a + ")");
    }
    const std::size_t if_frame = 7;
    for (std::size_t la = 1; la + if_frame < len; ++la) {
      for (std::size_t lb = 1; la + lb + if_frame < len; ++lb) {
        const std::size_t lc = len - if_frame - la - lb;
        for (const auto& a : by_len[la])
          for (const auto& b : by_len[lb])
            for (const auto& c : by_len[lc]) put("(IF " + a + " " + b + " " + c + ")");
      }
    }
  }
  for (auto& v : by_len) std::sort(v.begin(), v.end());
  return by_len;
}

// Count-only recurrence over a literal alphabet of `lit_size` symbols.
std::vector<double> oracle_counts(std::size_t max_len, double lit_size) {
  std::vector<double> t(max_len + 1, 0.0);
  auto lit_len = [&](std::size_t k) { return std::pow(lit_size, static_cast<double>(k)); };
  for (std::size_t len = 1; len <= max_len; ++len) {
    double c = 0;
    if (len == 5) c += 2;
    if (len == 6) c += 1;
    for (std::size_t frame : {8u, 12u, 12u}) {  // CONST, MATCH_PAD, PAD_COUNT
      if (len >= frame) c += lit_len(len - frame);
    }
    if (len >= 7) {
      const std::size_t k = len - 6;
      if (k == 1) c += 10;
      else if (k <= 19) c += 9 * std::pow(10.0, static_cast<double>(k - 1));
    }
    for (std::size_t frame : {10u, 6u, 8u, 14u}) {  // CONCAT EQ EVAL SPECIALIZE
      for (std::size_t la = 1; la + frame < len; ++la) c += t[la] * t[len - frame - la];
    }
    if (len > 5) c += t[len - 5];
    for (std::size_t la = 1; la + 7 < len; ++la)
      for (std::size_t lb = 1; la + lb + 7 < len; ++lb) c += t[la] * t[lb] * t[len - 7 - la - lb];
    t[len] = c;
  }
  return t;
}

}  // namespace

TEST_CASE("enumeration matches a brute-force grammar expansion") {
  // NUM literals are generated up to five digits, so lengths <= 11 are
  // complete; longer lengths hold a subset.
  const std::size_t complete_len = 11;
  const std::size_t max_len = 20;
  ProgramEnumerator en("a#");
  auto naive = naive_terms("a#", max_len);
  std::vector<std::string> flat;
  for (std::size_t len = 0; len <= complete_len; ++len) {
    CHECK(static_cast<std::uint64_t>(en.count_length(len)) == naive[len].size());
    std::vector<std::string> seen;
    en.visit_length(len, [&](const std::string& s) {
      seen.push_back(s);
      return true;
    });
    CHECK(seen == naive[len]);
    flat.insert(flat.end(), naive[len].begin(), naive[len].end());
  }
  REQUIRE(flat.size() > 1000);
  auto listed = en.enumerate(flat.size() - 1);
  REQUIRE(listed.size() == flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    CHECK(listed[i].text() == flat[i]);
    CHECK(canonical_text(parse_program(flat[i])) == flat[i]);
    if (i % 13 == 0 || i < 2000) {
      CHECK(en.program_at(i) == flat[i]);
      CHECK(en.index_of(flat[i]) == i);
    }
  }
  // longer lengths: ranks of a spread sample increase in lexicographic order
  for (std::size_t len = complete_len + 1; len <= max_len; ++len) {
    CAPTURE(len);
    std::optional<std::uint64_t> prev;
    const std::size_t step = naive[len].size() / 60 + 1;
    for (std::size_t i = 0; i < naive[len].size(); i += step) {
      const std::string& p = naive[len][i];
      auto idx = en.index_of(p);
      REQUIRE(idx);
      if (prev) CHECK(*idx > *prev);
      CHECK(en.program_at(*idx) == p);
      prev = idx;
    }
  }
  const auto expected = oracle_counts(max_len, 2);
  for (std::size_t len = 0; len <= max_len; ++len) {
    CHECK(static_cast<double>(en.count_length(len)) ==
          doctest::Approx(expected[len]).epsilon(1e-12));
  }
}

TEST_CASE("counts agree with an independent recurrence") {
  ProgramEnumerator en;
  const auto expected = oracle_counts(16, 53);
  for (std::size_t len = 0; len <= 16; ++len) {
    CAPTURE(len);
    CHECK(static_cast<double>(en.count_length(len)) == doctest::Approx(expected[len]).epsilon(1e-12));
  }
  const std::uint64_t small[] = {0, 0, 0, 0, 0, 2, 1, 10, 91, 953};
  for (std::size_t len = 0; len < 10; ++len) {
    CHECK(static_cast<std::uint64_t>(en.count_length(len)) == small[len]);
  }
}

TEST_CASE("rank and unrank round trip") {
  ProgramEnumerator en;
  testing_support::ProgramGen gen(5);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t idx = gen.pick(50'000'000);
    const std::string p = en.program_at(idx);
    CHECK(en.index_of(p) == idx);
    CHECK(en.in_universe(p));
  }
  CHECK(en.index_of("(CONST YDyn)") == 3987650u);
  CHECK(en.program_at(3987650) == "(CONST YDyn)");
  CHECK(en.index_of("(ORACLE G INPUT)") == std::nullopt);
  CHECK(en.index_of("(CONST a b)") == std::nullopt);
  CHECK(en.index_of("(CONST  )") == std::nullopt);
  CHECK(en.index_of("(NUM 007)") == std::nullopt);
  CHECK_FALSE(en.in_universe("(CONST \\()"));
}

TEST_CASE("enumerate prefixes are stable") {
  ProgramEnumerator en;
  auto big = en.enumerate(3000);
  for (std::uint64_t s : {0u, 1u, 2u, 17u, 400u, 2999u}) {
    auto small = en.enumerate(s);
    REQUIRE(small.size() == s + 1);
    CHECK(std::equal(small.begin(), small.end(), big.begin()));
  }
  CHECK(big[0].text() == "FIRST");
  CHECK(big[1].text() == "INPUT");
  CHECK(big[2].text() == "SECOND");
  CHECK(big[3].text() == "(NUM 0)");
}

TEST_CASE("literal alphabet restrictions") {
  CHECK_THROWS_AS(ProgramEnumerator("a("), InputError);
  CHECK_THROWS_AS(ProgramEnumerator("a b"), InputError);
  CHECK_NOTHROW(ProgramEnumerator("ba#a"));
  CHECK(ProgramEnumerator("ba#a").literal_alphabet() == "#ab");
}
