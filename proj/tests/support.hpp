#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "overspec/program.hpp"
#include "overspec/scenario.hpp"

#ifndef OVERSPEC_TEST_DATA
#define OVERSPEC_TEST_DATA "tests/data"
#endif

namespace testing_support {

inline std::string data_path(const std::string& rel) {
  return std::string(OVERSPEC_TEST_DATA) + "/" + rel;
}

// File contents without trailing whitespace.
inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ' || s.back() == '\r')) s.pop_back();
  return s;
}

// All strings over the alphabet up to max_len, in length-lex order.
inline std::vector<std::string> all_strings(const overspec::Alphabet& a,
                                            std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : a.symbols()) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

// Random program texts over the grammar. Literals may contain characters
// that need escaping. EVAL only ever runs a quoted total program, so
// generated programs halt.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  std::string literal(std::size_t max_len = 4) {
    static const std::string chars = "ab#()\\ :1";
    std::string s;
    const std::size_t n = pick(max_len + 1);
    for (std::size_t i = 0; i < n; ++i) s += chars[pick(chars.size())];
    return s;
  }

  std::string term(int depth) {
    const int leaves = 7;
    const int kinds = depth <= 0 ? leaves : 13;
    switch (pick(kinds)) {
      case 0: return "INPUT";
      case 1: return "FIRST";
      case 2: return "SECOND";
      case 3: return "(CONST " + encode(literal()) + ")";
      case 4: return "(MATCH_PAD " + encode(literal(2)) + ")";
      case 5: return "(PAD_COUNT " + encode(literal(2)) + ")";
      case 6: return "(NUM " + std::to_string(pick(20)) + ")";
      case 7: return "(CONCAT " + term(depth - 1) + " " + term(depth - 1) + ")";
      case 8: return "(EQ " + term(depth - 1) + " " + term(depth - 1) + ")";
      case 9:
        return "(IF " + term(depth - 1) + " " + term(depth - 1) + " " +
               term(depth - 1) + ")";
      case 10: return "(SQ " + term(depth - 1) + ")";
      case 11:
        return "(EVAL (CONST " + encode(term(depth - 1)) + ") " +
               term(depth - 1) + ")";
      default:
        return "(SPECIALIZE " + term(depth - 1) + " " + term(depth - 1) + ")";
    }
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

 private:
  static std::string encode(const std::string& s) {
    return overspec::encode_literal(s);
  }

  std::mt19937_64 rng_;
};

}  // namespace testing_support
