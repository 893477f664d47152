#pragma once

// Pipeline programs: S-expression syntax, canonical text, pairing, and the
// s-m-n text transformations. The canonical text of a program is its index.
//
// Grammar (canonical form shown; whitespace between tokens is flexible on
// input, literals are raw text up to the matching close parenthesis):
//
//   term := INPUT | FIRST | SECOND
//         | (CONST lit) | (MATCH_PAD lit) | (PAD_COUNT lit) | (NUM digits)
//         | (CONCAT term term) | (EQ term term) | (IF term term term)
//         | (SQ term) | (SIM_TM tm-token term term)
//         | (EVAL term term) | (SPECIALIZE term term) | (ORACLE name term)
//         | (SELFAPPLY term)                       ; sugar, see below
//
// A literal is written verbatim when its parentheses balance and it holds no
// backslash; otherwise every '(' ')' '\' in it is escaped with '\'.
// (SELFAPPLY t) expands to (SPECIALIZE (CONST <kSelfApplyTemplate>) t).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "overspec/turing.hpp"

namespace overspec {

enum class Op {
  kConst,
  kInput,
  kFirst,
  kSecond,
  kConcat,
  kEq,
  kIf,
  kMatchPad,
  kPadCount,
  kSimTm,
  kSq,
  kNum,
  kEval,
  kSpecialize,
  kOracle,
};

const char* op_keyword(Op op);

struct Node {
  Op op = Op::kConst;
  // Literal for CONST / MATCH_PAD / PAD_COUNT, digits for NUM, oracle name
  // for ORACLE, compact machine token for SIM_TM.
  std::string text;
  std::vector<Node> kids;
  std::shared_ptr<const TuringMachine> tm;
};

// H(n, x) = eval(eval(n, n), x) over the paired input.
inline constexpr std::string_view kSelfApplyTemplate =
    "(EVAL (EVAL FIRST FIRST) SECOND)";

Node parse_program(std::string_view text);
std::string canonical_text(const Node& node);
std::string encode_literal(std::string_view literal);

// True when the tree has no EVAL and no ORACLE node; such programs halt on
// every input given enough budget.
bool is_total_fragment(const Node& node);

// Program text plus its parsed tree. Always canonical: constructing from
// non-canonical text normalizes it.
class ProgramIndex {
 public:
  // Throws SyntaxError.
  explicit ProgramIndex(std::string_view text);
  explicit ProgramIndex(Node ast);

  const std::string& text() const { return text_; }
  const Node& ast() const { return *ast_; }
  std::shared_ptr<const Node> shared_ast() const { return ast_; }

  bool operator==(const ProgramIndex& other) const {
    return text_ == other.text_;
  }

 private:
  std::string text_;
  std::shared_ptr<const Node> ast_;
};

// pair(c, x) = decimal(|c|) ":" c x
std::string pair_prefix(std::string_view c);
std::string pair(std::string_view c, std::string_view x);
// Inverse of pair; nullopt when `s` is not a well-formed pair.
std::optional<std::pair<std::string, std::string>> unpair(std::string_view s);

// Specialization as pure text: evaluates `program_text` on pair(c, x).
// Does not check that program_text parses.
std::string specialize_text(std::string_view program_text, std::string_view c);

// s-m-n: index q with eval(q, x) ≃ eval(p, pair(c, x)).
ProgramIndex smn_specialize(const ProgramIndex& p, std::string_view c);

// q(n) = smn_specialize(kSelfApplyTemplate, n).
ProgramIndex self_application_operator(const ProgramIndex& n);
std::string self_application_text(std::string_view n_text);

}  // namespace overspec
