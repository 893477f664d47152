#include "overspec/enumeration.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "overspec/errors.hpp"

namespace overspec {
namespace {

using Count = ProgramEnumerator::Count;

constexpr Count kCountMax = ~static_cast<Count>(0);
constexpr std::size_t kMinTerm = 5;  // FIRST / INPUT
constexpr std::size_t kMaxDigits = 19;
constexpr std::size_t kMaxLength = 256;

Count sat_add(Count a, Count b) { return b > kCountMax - a ? kCountMax : a + b; }

Count sat_mul(Count a, Count b) {
  if (a != 0 && b > kCountMax / a) return kCountMax;
  return a * b;
}

Count pow_sat(Count base, std::size_t exp) {
  Count out = 1;
  for (std::size_t i = 0; i < exp; ++i) out = sat_mul(out, base);
  return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Canonical decimal strings of length k (no leading zero unless "0").
Count digits_count(std::size_t k) {
  if (k == 0 || k > kMaxDigits) return 0;
  if (k == 1) return 10;
  return sat_mul(9, pow_sat(10, k - 1));
}

}  // namespace

struct ProgramEnumerator::Query {
  std::string_view text;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>,
           Count>
      seq;
  std::map<std::pair<std::size_t, std::size_t>, Count> term;
  std::map<std::pair<std::size_t, std::size_t>, bool> is_term;
};

std::string ProgramEnumerator::default_literal_alphabet() {
  std::string chars = "#";
  for (char c = 'A'; c <= 'Z'; ++c) chars += c;
  for (char c = 'a'; c <= 'z'; ++c) chars += c;
  return chars;
}

ProgramEnumerator::ProgramEnumerator(std::string literal_alphabet)
    : literal_chars_(std::move(literal_alphabet)) {
  std::sort(literal_chars_.begin(), literal_chars_.end());
  literal_chars_.erase(
      std::unique(literal_chars_.begin(), literal_chars_.end()),
      literal_chars_.end());
  for (char c : literal_chars_) {
    if (c == '(' || c == ')' || c == '\\' || c == ' ' || c == '\t' ||
        c == '\n' || c == '\r') {
      throw InputError(std::string("literal alphabet may not contain '") + c +
                       "'");
    }
  }

  auto fixed = [](std::string s) { return Item{Item::kFixed, std::move(s)}; };
  const Item term{Item::kTerm, {}};
  const Item lit{Item::kLit, {}};
  const Item digits{Item::kDigits, {}};
  const Item sp = fixed(" ");
  const Item close = fixed(")");
  families_ = {
      {fixed("(CONCAT "), term, sp, term, close},
      {fixed("(CONST "), lit, close},
      {fixed("(EQ "), term, sp, term, close},
      {fixed("(EVAL "), term, sp, term, close},
      {fixed("(IF "), term, sp, term, sp, term, close},
      {fixed("(MATCH_PAD "), lit, close},
      {fixed("(NUM "), digits, close},
      {fixed("(PAD_COUNT "), lit, close},
      {fixed("(SPECIALIZE "), term, sp, term, close},
      {fixed("(SQ "), term, close},
      {fixed("FIRST")},
      {fixed("INPUT")},
      {fixed("SECOND")},
  };
  // Family prefixes are pairwise prefix-free, so sorting by prefix sorts
  // the families' string sets.
  std::sort(families_.begin(), families_.end(),
            [](const Family& a, const Family& b) {
              return a.front().fixed < b.front().fixed;
            });

  std::set<char> chars(literal_chars_.begin(), literal_chars_.end());
  for (const auto& f : families_) {
    for (const auto& item : f) chars.insert(item.fixed.begin(), item.fixed.end());
  }
  for (char c = '0'; c <= '9'; ++c) chars.insert(c);
  universe_chars_.assign(chars.begin(), chars.end());
}

Count ProgramEnumerator::lit_count(std::size_t k) const {
  return pow_sat(literal_chars_.size(), k);
}

Count ProgramEnumerator::count_length(std::size_t length) const {
  if (length > kMaxLength) return kCountMax;
  auto hit = term_memo_.find(length);
  if (hit != term_memo_.end()) return hit->second;
  Count total = 0;
  for (std::size_t f = 0; f < families_.size(); ++f) {
    total = sat_add(total, count_seq(families_[f], f, 0, length));
  }
  term_memo_.emplace(length, total);
  return total;
}

Count ProgramEnumerator::count_seq(const Family& f, std::size_t family_id,
                                   std::size_t i, std::size_t length) const {
  if (i == f.size()) return length == 0 ? 1 : 0;
  auto key = std::make_tuple(family_id, i, length);
  auto hit = seq_memo_.find(key);
  if (hit != seq_memo_.end()) return hit->second;
  Count total = 0;
  const Item& item = f[i];
  switch (item.kind) {
    case Item::kFixed:
      if (length >= item.fixed.size()) {
        total = count_seq(f, family_id, i + 1, length - item.fixed.size());
      }
      break;
    case Item::kTerm:
      for (std::size_t l = kMinTerm; l <= length; ++l) {
        Count rest = count_seq(f, family_id, i + 1, length - l);
        if (rest) total = sat_add(total, sat_mul(count_length(l), rest));
      }
      break;
    case Item::kLit:
      for (std::size_t k = 0; k <= length; ++k) {
        Count rest = count_seq(f, family_id, i + 1, length - k);
        if (rest) total = sat_add(total, sat_mul(lit_count(k), rest));
      }
      break;
    case Item::kDigits:
      for (std::size_t k = 1; k <= std::min(length, kMaxDigits); ++k) {
        Count rest = count_seq(f, family_id, i + 1, length - k);
        if (rest) total = sat_add(total, sat_mul(digits_count(k), rest));
      }
      break;
  }
  seq_memo_.emplace(key, total);
  return total;
}

Count ProgramEnumerator::count_prefix(Query& q, std::size_t length,
                                      std::size_t off) const {
  if (off == q.text.size()) return count_length(length);
  auto key = std::make_pair(length, off);
  auto hit = q.term.find(key);
  if (hit != q.term.end()) return hit->second;
  Count total = 0;
  for (std::size_t f = 0; f < families_.size(); ++f) {
    total = sat_add(total, count_seq_prefix(q, f, 0, length, off));
  }
  q.term.emplace(key, total);
  return total;
}

Count ProgramEnumerator::count_seq_prefix(Query& q, std::size_t family_id,
                                          std::size_t i, std::size_t length,
                                          std::size_t off) const {
  const Family& f = families_[family_id];
  if (off == q.text.size()) return count_seq(f, family_id, i, length);
  if (i == f.size()) return 0;
  auto key = std::make_tuple(family_id, i, length, off);
  auto hit = q.seq.find(key);
  if (hit != q.seq.end()) return hit->second;

  const std::string_view rest = q.text.substr(off);
  const std::size_t rem = rest.size();
  const Item& item = f[i];
  Count total = 0;
  switch (item.kind) {
    case Item::kFixed: {
      const std::string& s = item.fixed;
      if (length < s.size()) break;
      std::size_t m = std::min(s.size(), rem);
      if (rest.substr(0, m) != std::string_view(s).substr(0, m)) break;
      total = count_seq_prefix(q, family_id, i + 1, length - s.size(), off + m);
      break;
    }
    case Item::kTerm:
      for (std::size_t l = kMinTerm; l <= length; ++l) {
        if (rem <= l) {
          Count tail = count_seq(f, family_id, i + 1, length - l);
          if (tail) {
            total = sat_add(total, sat_mul(count_prefix(q, l, off), tail));
          }
        } else {
          auto tkey = std::make_pair(off, l);
          auto cached = q.is_term.find(tkey);
          bool ok = cached != q.is_term.end()
                        ? cached->second
                        : q.is_term.emplace(tkey, in_universe(rest.substr(0, l)))
                              .first->second;
          if (ok) {
            total = sat_add(
                total, count_seq_prefix(q, family_id, i + 1, length - l, off + l));
          }
        }
      }
      break;
    case Item::kLit: {
      std::size_t lit_run = 0;
      while (lit_run < rem &&
             literal_chars_.find(rest[lit_run]) != std::string::npos) {
        ++lit_run;
      }
      for (std::size_t k = 0; k <= length; ++k) {
        if (rem <= k) {
          if (lit_run < rem) break;
          Count tail = count_seq(f, family_id, i + 1, length - k);
          if (tail) total = sat_add(total, sat_mul(lit_count(k - rem), tail));
        } else {
          if (k > lit_run) break;
          total = sat_add(
              total, count_seq_prefix(q, family_id, i + 1, length - k, off + k));
        }
      }
      break;
    }
    case Item::kDigits: {
      std::size_t digit_run = 0;
      while (digit_run < rem && is_digit(rest[digit_run])) ++digit_run;
      if (digit_run == 0) break;
      const bool leading_zero = rest[0] == '0';
      for (std::size_t k = 1; k <= std::min(length, kMaxDigits); ++k) {
        if (leading_zero && k > 1) break;
        if (rem <= k) {
          if (digit_run < rem) break;
          Count tail = count_seq(f, family_id, i + 1, length - k);
          if (tail) total = sat_add(total, sat_mul(pow_sat(10, k - rem), tail));
        } else {
          if (k > digit_run) break;
          total = sat_add(
              total, count_seq_prefix(q, family_id, i + 1, length - k, off + k));
        }
      }
      break;
    }
  }
  q.seq.emplace(key, total);
  return total;
}

bool ProgramEnumerator::in_universe(std::string_view text) const {
  Node ast;
  try {
    ast = parse_program(text);
  } catch (const SyntaxError&) {
    return false;
  }
  if (canonical_text(ast) != text) return false;
  std::vector<const Node*> todo{&ast};
  while (!todo.empty()) {
    const Node* n = todo.back();
    todo.pop_back();
    if (n->op == Op::kOracle || n->op == Op::kSimTm) return false;
    if (n->op == Op::kConst || n->op == Op::kMatchPad ||
        n->op == Op::kPadCount) {
      for (char c : n->text) {
        if (literal_chars_.find(c) == std::string::npos) return false;
      }
    }
    for (const auto& k : n->kids) todo.push_back(&k);
  }
  return true;
}

std::string ProgramEnumerator::program_at(std::uint64_t index) const {
  Count remaining = index;
  std::size_t length = 0;
  while (true) {
    if (length > kMaxLength) throw InvariantViolation("enumeration overflow");
    Count c = count_length(length);
    if (remaining < c) break;
    remaining -= c;
    ++length;
  }
  std::string prefix;
  while (prefix.size() < length) {
    bool placed = false;
    for (char ch : universe_chars_) {
      prefix.push_back(ch);
      Query q{prefix, {}, {}, {}};
      Count c = count_prefix(q, length, 0);
      if (remaining < c) {
        placed = true;
        break;
      }
      remaining -= c;
      prefix.pop_back();
    }
    if (!placed) throw InvariantViolation("unranking found no continuation");
  }
  return prefix;
}

std::optional<std::uint64_t> ProgramEnumerator::index_of(
    std::string_view text) const {
  if (!in_universe(text)) return std::nullopt;
  Count rank = 0;
  for (std::size_t l = 0; l < text.size(); ++l) {
    rank = sat_add(rank, count_length(l));
  }
  std::string prefix;
  for (char actual : text) {
    for (char ch : universe_chars_) {
      if (ch >= actual) break;
      prefix.push_back(ch);
      Query q{prefix, {}, {}, {}};
      rank = sat_add(rank, count_prefix(q, text.size(), 0));
      prefix.pop_back();
    }
    prefix.push_back(actual);
  }
  if (rank > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(rank);
}

const std::vector<std::string>& ProgramEnumerator::terms_of_length(
    std::size_t length) const {
  auto hit = by_length_.find(length);
  if (hit != by_length_.end()) return hit->second;
  std::vector<std::string> out;
  visit_length(length, [&out](const std::string& s) {
    out.push_back(s);
    return true;
  });
  return by_length_.emplace(length, std::move(out)).first->second;
}

const std::vector<std::string>& ProgramEnumerator::terms_up_to(
    std::size_t length) const {
  auto hit = up_to_.find(length);
  if (hit != up_to_.end()) return hit->second;
  std::vector<std::string> out;
  for (std::size_t l = kMinTerm; l <= length; ++l) {
    const auto& layer = terms_of_length(l);
    std::vector<std::string> merged;
    merged.reserve(out.size() + layer.size());
    std::merge(out.begin(), out.end(), layer.begin(), layer.end(),
               std::back_inserter(merged));
    out = std::move(merged);
  }
  return up_to_.emplace(length, std::move(out)).first->second;
}

bool ProgramEnumerator::visit_length(
    std::size_t length,
    const std::function<bool(const std::string&)>& visit) const {
  std::string prefix;
  for (std::size_t f = 0; f < families_.size(); ++f) {
    if (count_seq(families_[f], f, 0, length) == 0) continue;
    if (!visit_seq(families_[f], 0, length, prefix, visit)) return false;
  }
  return true;
}

// Literal and digit items are always followed by the closing ")" alone, so
// their length is fixed by `length`; term items are iterated over all
// lengths at once in lexicographic order, which is valid because terms are
// prefix-free.
bool ProgramEnumerator::visit_seq(
    const Family& f, std::size_t i, std::size_t length, std::string& prefix,
    const std::function<bool(const std::string&)>& visit) const {
  if (i == f.size()) return length == 0 ? visit(prefix) : true;
  const Item& item = f[i];
  const std::size_t family_id = static_cast<std::size_t>(&f - families_.data());
  const std::size_t mark = prefix.size();
  switch (item.kind) {
    case Item::kFixed: {
      if (length < item.fixed.size()) return true;
      prefix += item.fixed;
      bool go = visit_seq(f, i + 1, length - item.fixed.size(), prefix, visit);
      prefix.resize(mark);
      return go;
    }
    case Item::kTerm: {
      if (length < kMinTerm) return true;
      for (const auto& t : terms_up_to(length)) {
        if (count_seq(f, family_id, i + 1, length - t.size()) == 0) continue;
        prefix += t;
        bool go = visit_seq(f, i + 1, length - t.size(), prefix, visit);
        prefix.resize(mark);
        if (!go) return false;
      }
      return true;
    }
    case Item::kLit:
    case Item::kDigits: {
      if (length < 1) return true;
      const std::size_t k = length - 1;
      const bool digits = item.kind == Item::kDigits;
      if (digits && (k == 0 || k > kMaxDigits)) return true;
      const std::string alphabet = digits ? "0123456789" : literal_chars_;
      if (!digits && alphabet.empty() && k > 0) return true;
      std::vector<std::size_t> odo(k, 0);
      if (digits && k > 1) odo[0] = 1;
      while (true) {
        prefix.resize(mark);
        for (std::size_t p : odo) prefix += alphabet[p];
        prefix += ')';
        if (!visit(prefix)) {
          prefix.resize(mark);
          return false;
        }
        std::size_t pos = k;
        while (pos > 0 && odo[pos - 1] + 1 == alphabet.size()) {
          odo[pos - 1] = 0;
          --pos;
        }
        if (pos == 0) break;
        ++odo[pos - 1];
      }
      prefix.resize(mark);
      return true;
    }
  }
  return true;
}

std::vector<ProgramIndex> ProgramEnumerator::enumerate(
    std::uint64_t stage) const {
  std::vector<ProgramIndex> out;
  const std::uint64_t wanted = stage + 1;
  for (std::size_t length = 0; out.size() < wanted; ++length) {
    if (length > kMaxLength) throw InvariantViolation("enumeration overflow");
    if (count_length(length) == 0) continue;
    visit_length(length, [&](const std::string& s) {
      out.emplace_back(s);
      return out.size() < wanted;
    });
  }
  return out;
}

}  // namespace overspec
