#pragma once

// Effective enumeration of program indices in length-lex order.
//
// The enumerated universe is every canonical program built from the
// oracle-free, machine-free forms (INPUT FIRST SECOND CONST MATCH_PAD
// PAD_COUNT NUM CONCAT EQ IF SQ EVAL SPECIALIZE) whose literals are drawn
// from a fixed literal alphabet. Each length class is finite, so ranking
// and unranking are done by counting rather than listing.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "overspec/program.hpp"

namespace overspec {

class ProgramEnumerator {
 public:
  using Count = unsigned __int128;

  // '#' plus ASCII letters.
  static std::string default_literal_alphabet();

  // Literal characters may not include whitespace, '(', ')' or '\'.
  explicit ProgramEnumerator(
      std::string literal_alphabet = default_literal_alphabet());

  // Number of enumerated programs of exactly `length` characters
  // (saturating).
  Count count_length(std::size_t length) const;

  // Programs 0..stage in order. enumerate(s) is a prefix of enumerate(s+1).
  std::vector<ProgramIndex> enumerate(std::uint64_t stage) const;

  std::string program_at(std::uint64_t index) const;
  // nullopt when `text` is not in the enumerated universe.
  std::optional<std::uint64_t> index_of(std::string_view text) const;

  // Visits programs of exactly `length` characters in lexicographic order
  // until `visit` returns false. Returns false if stopped early.
  bool visit_length(std::size_t length,
                    const std::function<bool(const std::string&)>& visit) const;

  bool in_universe(std::string_view text) const;

  const std::string& literal_alphabet() const { return literal_chars_; }

 private:
  struct Item {
    enum Kind { kFixed, kTerm, kLit, kDigits } kind;
    std::string fixed;
  };
  using Family = std::vector<Item>;

  struct Query;

  Count count_seq(const Family& f, std::size_t family_id, std::size_t i,
                  std::size_t length) const;
  Count count_prefix(Query& q, std::size_t length, std::size_t off) const;
  Count count_seq_prefix(Query& q, std::size_t family_id, std::size_t i,
                         std::size_t length, std::size_t off) const;
  Count lit_count(std::size_t k) const;

  const std::vector<std::string>& terms_of_length(std::size_t length) const;
  const std::vector<std::string>& terms_up_to(std::size_t length) const;
  bool visit_seq(const Family& f, std::size_t i, std::size_t length,
                 std::string& prefix,
                 const std::function<bool(const std::string&)>& visit) const;

  std::string literal_chars_;
  std::string universe_chars_;
  std::vector<Family> families_;

  mutable std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Count>
      seq_memo_;
  mutable std::map<std::size_t, Count> term_memo_;
  mutable std::map<std::size_t, std::vector<std::string>> by_length_;
  mutable std::map<std::size_t, std::vector<std::string>> up_to_;
};

}  // namespace overspec
