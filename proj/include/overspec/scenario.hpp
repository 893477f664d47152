#pragma once

// Workload instances, signature/warrant extractors, the compatibility
// relation, and the v / v_bw scores built on them.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace overspec {

// Ordered finite symbol set with one designated padding symbol. Symbols are
// single bytes; the configured order drives length-lex enumeration.
class Alphabet {
 public:
  Alphabet(std::vector<char> symbols, char pad);

  const std::vector<char>& symbols() const { return symbols_; }
  char pad() const { return pad_; }
  std::size_t size() const { return symbols_.size(); }

  bool contains(char c) const;
  bool accepts(std::string_view text) const;
  // Position of `c` in the configured order; requires contains(c).
  std::size_t rank(char c) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<char> symbols_;
  char pad_;
};

// |Σ^{≤n}| = Σ_{j=0..n} |Σ|^j. Saturates at UINT64_MAX.
std::uint64_t domain_size(const Alphabet& alphabet, std::size_t max_len);

// The index-th string of Σ* in length-lex order (alphabet order as configured).
std::string instance_at(const Alphabet& alphabet, std::uint64_t index);

// Advances `text` to its length-lex successor over the alphabet.
void next_instance(const Alphabet& alphabet, std::string& text);

struct Feature {
  std::string label;

  auto operator<=>(const Feature&) const = default;
};

using FeatureSet = std::set<Feature>;

// A workload instance: text known to lie in Σ*.
class Instance {
 public:
  // Throws InputError naming the first offending character.
  Instance(const Alphabet& alphabet, std::string text);

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

enum class PatternKind { kEquals, kPadded, kDefault };

// One (pattern -> feature set) rule. kEquals matches the literal exactly,
// kPadded matches literal·pad^n for any n >= 0, kDefault matches anything.
struct FeatureRule {
  PatternKind kind = PatternKind::kDefault;
  std::string literal;
  FeatureSet features;

  bool matches(std::string_view x, char pad) const;
  bool operator==(const FeatureRule&) const = default;
};

// First matching rule wins; an instance no rule matches gets the empty set,
// which keeps the extractor total.
struct RuleTable {
  std::vector<FeatureRule> rules;

  FeatureSet apply(std::string_view x, char pad) const;
  bool operator==(const RuleTable&) const = default;
};

// V(y, s) in {-1, 0, +1}; pairs not listed are 0.
class CompatTable {
 public:
  void set(const std::string& implementation, const Feature& feature,
           int value);
  int value(std::string_view implementation, const Feature& feature) const;

  const std::map<std::string, std::map<Feature, int>, std::less<>>& entries()
      const {
    return entries_;
  }
  bool operator==(const CompatTable&) const = default;

 private:
  std::map<std::string, std::map<Feature, int>, std::less<>> entries_;
};

struct WitnessKit {
  std::string x0;
  Feature s0;
  std::string y_plus;
  std::string epsilon;

  bool operator==(const WitnessKit&) const = default;
};

struct ScenarioConfig {
  Alphabet alphabet;
  RuleTable signature_rules;
  RuleTable warrant_rules;
  CompatTable compat;
  WitnessKit witness_kit;

  FeatureSet signature(std::string_view x) const;
  FeatureSet warrant(std::string_view x) const;
  // Every feature mentioned by a rule, the compat table, or the witness kit.
  FeatureSet feature_universe() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Σ = {a, b, #}; S(a#^n) = {dyn, sorted}, W(a#^n) = {sorted};
// every other instance has S = W = {sorted}. V(YDyn, dyn) = +1,
// V(YStatic, dyn) = -1, V(YStatic, sorted) = +1.
ScenarioConfig default_scenario();

// v(x, y) = Σ_{s∈S(x)} V(y, s). Throws InputError if x ∉ Σ*.
int compatibility_score(std::string_view x, std::string_view y,
                        const ScenarioConfig& cfg);

// v_bw(x, y) = Σ_{s∈S(x)\W(x)} V(y, s). Throws InputError if x ∉ Σ*.
int beyond_warrant_score(std::string_view x, std::string_view y,
                         const ScenarioConfig& cfg);

struct Violation {
  std::string check;
  std::string detail;
  std::optional<std::string> instance;
  std::optional<std::size_t> pad_depth;
  std::optional<std::string> feature;
};

struct ValidationReport {
  std::size_t check_bound = 0;
  std::size_t instances_checked = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_scenario(const ScenarioConfig& cfg,
                                   std::size_t check_bound);

nlohmann::json to_json(const ScenarioConfig& cfg);
nlohmann::json to_json(const ValidationReport& report);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
std::string serialize_scenario(const ScenarioConfig& cfg);
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace overspec
