#include "overspec/program.hpp"

#include <algorithm>
#include <cctype>

#include "overspec/errors.hpp"

namespace overspec {
namespace {

constexpr std::size_t kMaxNesting = 4096;

struct Keyword {
  std::string_view word;
  Op op;
};

constexpr Keyword kKeywords[] = {
    {"CONST", Op::kConst},       {"INPUT", Op::kInput},
    {"FIRST", Op::kFirst},       {"SECOND", Op::kSecond},
    {"CONCAT", Op::kConcat},     {"EQ", Op::kEq},
    {"IF", Op::kIf},             {"MATCH_PAD", Op::kMatchPad},
    {"PAD_COUNT", Op::kPadCount}, {"SIM_TM", Op::kSimTm},
    {"SQ", Op::kSq},             {"NUM", Op::kNum},
    {"EVAL", Op::kEval},         {"SPECIALIZE", Op::kSpecialize},
    {"ORACLE", Op::kOracle},
};

std::size_t arity(Op op) {
  switch (op) {
    case Op::kInput:
    case Op::kFirst:
    case Op::kSecond:
    case Op::kConst:
    case Op::kMatchPad:
    case Op::kPadCount:
    case Op::kNum:
      return 0;
    case Op::kSq:
    case Op::kOracle:
      return 1;
    case Op::kConcat:
    case Op::kEq:
    case Op::kEval:
    case Op::kSpecialize:
    case Op::kSimTm:
      return 2;
    case Op::kIf:
      return 3;
  }
  return 0;
}

bool is_literal_op(Op op) {
  return op == Op::kConst || op == Op::kMatchPad || op == Op::kPadCount;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Node parse_all() {
    skip_space();
    Node node = parse_term(0);
    skip_space();
    if (pos_ != text_.size()) fail("trailing text after program");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view word() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    return text_.substr(begin, pos_ - begin);
  }

  // Token up to whitespace or ')' (used for NUM digits and SIM_TM tokens).
  std::string_view bare_token() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    return text_.substr(begin, pos_ - begin);
  }

  void expect_close() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
  }

  void expect_separator() {
    if (pos_ >= text_.size() || !is_space(text_[pos_])) {
      fail("expected whitespace");
    }
    skip_space();
  }

  // Raw literal: everything up to the ')' that closes the enclosing form.
  std::string literal() {
    std::string out;
    int depth = 0;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated literal");
      char c = text_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= text_.size()) fail("dangling escape in literal");
        out.push_back(text_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      out.push_back(c);
      ++pos_;
    }
    ++pos_;  // consume the closing ')'
    return out;
  }

  Node parse_term(std::size_t depth) {
    if (depth > kMaxNesting) fail("program nesting too deep");
    if (pos_ >= text_.size()) fail("unexpected end of program");
    if (text_[pos_] != '(') {
      std::string_view w = word();
      if (w == "INPUT") return Node{Op::kInput, {}, {}, nullptr};
      if (w == "FIRST") return Node{Op::kFirst, {}, {}, nullptr};
      if (w == "SECOND") return Node{Op::kSecond, {}, {}, nullptr};
      fail(w.empty() ? "expected a term" : "unknown atom '" + std::string(w) + "'");
    }
    ++pos_;
    skip_space();
    const std::size_t keyword_pos = pos_;
    std::string_view w = word();
    if (w == "SELFAPPLY") {
      expect_separator();
      Node arg = parse_term(depth + 1);
      expect_close();
      Node node{Op::kSpecialize, {}, {}, nullptr};
      node.kids.push_back(
          Node{Op::kConst, std::string(kSelfApplyTemplate), {}, nullptr});
      node.kids.push_back(std::move(arg));
      return node;
    }
    auto kw = std::find_if(std::begin(kKeywords), std::end(kKeywords),
                           [w](const Keyword& k) { return k.word == w; });
    if (kw == std::end(kKeywords)) {
      pos_ = keyword_pos;
      fail("unknown form '" + std::string(w) + "'");
    }
    Node node{kw->op, {}, {}, nullptr};
    if (arity(node.op) == 0 && !is_literal_op(node.op) &&
        node.op != Op::kNum) {
      // INPUT / FIRST / SECOND are bare atoms, never parenthesized.
      pos_ = keyword_pos;
      fail("'" + std::string(w) + "' takes no parentheses");
    }
    if (is_literal_op(node.op)) {
      // One optional separator space, then the raw literal.
      if (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
      node.text = literal();
      return node;
    }
    if (node.op == Op::kNum) {
      expect_separator();
      std::size_t at = pos_;
      std::string_view digits = bare_token();
      if (digits.empty() ||
          !std::all_of(digits.begin(), digits.end(),
                       [](char c) { return c >= '0' && c <= '9'; })) {
        pos_ = at;
        fail("NUM expects decimal digits");
      }
      std::size_t nz = digits.find_first_not_of('0');
      node.text = nz == std::string_view::npos ? "0"
                                               : std::string(digits.substr(nz));
      if (node.text.size() > 19) {
        pos_ = at;
        fail("NUM literal too large");
      }
      expect_close();
      return node;
    }
    if (node.op == Op::kOracle) {
      expect_separator();
      std::size_t at = pos_;
      node.text = std::string(word());
      if (node.text.empty()) {
        pos_ = at;
        fail("ORACLE expects a name");
      }
    } else if (node.op == Op::kSimTm) {
      expect_separator();
      std::size_t at = pos_;
      std::string_view token = bare_token();
      try {
        auto tm = std::make_shared<const TuringMachine>(
            TuringMachine::from_compact(token));
        node.text = tm->compact();
        node.tm = std::move(tm);
      } catch (const InputError& e) {
        pos_ = at;
        fail(std::string("bad machine token: ") + e.what());
      }
    }
    for (std::size_t i = 0; i < arity(node.op); ++i) {
      expect_separator();
      node.kids.push_back(parse_term(depth + 1));
    }
    expect_close();
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const Node& node, std::string& out) {
  switch (node.op) {
    case Op::kInput:
    case Op::kFirst:
    case Op::kSecond:
      out += op_keyword(node.op);
      return;
    case Op::kConst:
    case Op::kMatchPad:
    case Op::kPadCount:
      out += '(';
      out += op_keyword(node.op);
      out += ' ';
      out += encode_literal(node.text);
      out += ')';
      return;
    default:
      break;
  }
  out += '(';
  out += op_keyword(node.op);
  if (node.op == Op::kNum || node.op == Op::kOracle || node.op == Op::kSimTm) {
    out += ' ';
    out += node.text;
  }
  for (const auto& kid : node.kids) {
    out += ' ';
    print(kid, out);
  }
  out += ')';
}

}  // namespace

const char* op_keyword(Op op) {
  for (const auto& k : kKeywords) {
    if (k.op == op) return k.word.data();
  }
  return "?";
}

Node parse_program(std::string_view text) { return Parser(text).parse_all(); }

std::string canonical_text(const Node& node) {
  std::string out;
  print(node, out);
  return out;
}

std::string encode_literal(std::string_view literal) {
  int depth = 0;
  bool verbatim = true;
  for (char c : literal) {
    if (c == '\\') verbatim = false;
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) verbatim = false;
    if (!verbatim) break;
  }
  if (verbatim && depth == 0) return std::string(literal);
  std::string out;
  out.reserve(literal.size() + 8);
  for (char c : literal) {
    if (c == '(' || c == ')' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

bool is_total_fragment(const Node& node) {
  if (node.op == Op::kEval || node.op == Op::kOracle) return false;
  return std::all_of(node.kids.begin(), node.kids.end(),
                     [](const Node& k) { return is_total_fragment(k); });
}

ProgramIndex::ProgramIndex(std::string_view text)
    : ProgramIndex(parse_program(text)) {}

ProgramIndex::ProgramIndex(Node ast)
    : text_(canonical_text(ast)),
      ast_(std::make_shared<const Node>(std::move(ast))) {}

std::string pair_prefix(std::string_view c) {
  return std::to_string(c.size()) + ":" + std::string(c);
}

std::string pair(std::string_view c, std::string_view x) {
  return pair_prefix(c) + std::string(x);
}

std::optional<std::pair<std::string, std::string>> unpair(std::string_view s) {
  std::size_t colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 19) {
    return std::nullopt;
  }
  std::string_view digits = s.substr(0, colon);
  if (!std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  std::uint64_t len = std::stoull(std::string(digits));
  std::string_view rest = s.substr(colon + 1);
  if (len > rest.size()) return std::nullopt;
  return std::make_pair(std::string(rest.substr(0, len)),
                        std::string(rest.substr(len)));
}

std::string specialize_text(std::string_view program_text,
                            std::string_view c) {
  std::string out = "(EVAL (CONST ";
  out += encode_literal(program_text);
  out += ") (CONCAT (CONST ";
  out += encode_literal(pair_prefix(c));
  out += ") INPUT))";
  return out;
}

ProgramIndex smn_specialize(const ProgramIndex& p, std::string_view c) {
  return ProgramIndex(specialize_text(p.text(), c));
}

std::string self_application_text(std::string_view n_text) {
  return specialize_text(kSelfApplyTemplate, n_text);
}

ProgramIndex self_application_operator(const ProgramIndex& n) {
  return ProgramIndex(self_application_text(n.text()));
}

}  // namespace overspec
