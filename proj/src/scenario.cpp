#include "overspec/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "overspec/errors.hpp"

namespace overspec {
namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kMax / a) return kMax;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > kMax - a ? kMax : a + b;
}

std::string describe_char(char c) {
  std::ostringstream out;
  out << "'" << c << "' (0x" << std::hex << (static_cast<int>(c) & 0xff)
      << ")";
  return out.str();
}

bool is_padded(std::string_view x, std::string_view literal, char pad) {
  if (x.size() < literal.size() || x.substr(0, literal.size()) != literal) {
    return false;
  }
  return std::all_of(x.begin() + static_cast<std::ptrdiff_t>(literal.size()),
                     x.end(), [pad](char c) { return c == pad; });
}

void require_instance(std::string_view x, const Alphabet& alphabet) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!alphabet.contains(x[i])) {
      throw InputError("instance character " + describe_char(x[i]) +
                       " at position " + std::to_string(i) +
                       " is not in the alphabet");
    }
  }
}

std::string join(const FeatureSet& set) {
  std::string out = "{";
  for (const auto& f : set) {
    if (out.size() > 1) out += ",";
    out += f.label;
  }
  return out + "}";
}

}  // namespace

Alphabet::Alphabet(std::vector<char> symbols, char pad)
    : symbols_(std::move(symbols)), pad_(pad) {
  if (symbols_.empty()) throw InputError("alphabet must be non-empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (symbols_[i] == symbols_[j]) {
        throw InputError("alphabet symbol " + describe_char(symbols_[i]) +
                         " is repeated");
      }
    }
  }
  if (!contains(pad_)) {
    throw InputError("pad symbol " + describe_char(pad_) +
                     " is not in the alphabet");
  }
}

bool Alphabet::contains(char c) const {
  return std::find(symbols_.begin(), symbols_.end(), c) != symbols_.end();
}

bool Alphabet::accepts(std::string_view text) const {
  return std::all_of(text.begin(), text.end(),
                     [this](char c) { return contains(c); });
}

std::size_t Alphabet::rank(char c) const {
  return static_cast<std::size_t>(
      std::find(symbols_.begin(), symbols_.end(), c) - symbols_.begin());
}

std::uint64_t domain_size(const Alphabet& alphabet, std::size_t max_len) {
  std::uint64_t total = 0;
  std::uint64_t layer = 1;
  for (std::size_t j = 0; j <= max_len; ++j) {
    total = sat_add(total, layer);
    layer = sat_mul(layer, alphabet.size());
  }
  return total;
}

std::string instance_at(const Alphabet& alphabet, std::uint64_t index) {
  const std::uint64_t k = alphabet.size();
  std::size_t length = 0;
  std::uint64_t layer = 1;
  while (index >= layer) {
    index -= layer;
    layer = sat_mul(layer, k);
    ++length;
  }
  std::string text(length, alphabet.symbols().front());
  for (std::size_t pos = length; pos > 0; --pos) {
    text[pos - 1] = alphabet.symbols()[index % k];
    index /= k;
  }
  return text;
}

void next_instance(const Alphabet& alphabet, std::string& text) {
  const auto& symbols = alphabet.symbols();
  for (std::size_t pos = text.size(); pos > 0; --pos) {
    std::size_t r = alphabet.rank(text[pos - 1]);
    if (r + 1 < symbols.size()) {
      text[pos - 1] = symbols[r + 1];
      return;
    }
    text[pos - 1] = symbols.front();
  }
  text.assign(text.size() + 1, symbols.front());
}

Instance::Instance(const Alphabet& alphabet, std::string text)
    : text_(std::move(text)) {
  require_instance(text_, alphabet);
}

bool FeatureRule::matches(std::string_view x, char pad) const {
  switch (kind) {
    case PatternKind::kEquals:
      return x == literal;
    case PatternKind::kPadded:
      return is_padded(x, literal, pad);
    case PatternKind::kDefault:
      return true;
  }
  return false;
}

FeatureSet RuleTable::apply(std::string_view x, char pad) const {
  for (const auto& rule : rules) {
    if (rule.matches(x, pad)) return rule.features;
  }
  return {};
}

void CompatTable::set(const std::string& implementation,
                      const Feature& feature, int value) {
  if (value < -1 || value > 1) {
    throw InputError("compatibility value for (" + implementation + ", " +
                     feature.label + ") must be -1, 0 or +1, got " +
                     std::to_string(value));
  }
  if (feature.label.empty()) throw InputError("feature label is empty");
  entries_[implementation][feature] = value;
}

int CompatTable::value(std::string_view implementation,
                       const Feature& feature) const {
  auto row = entries_.find(implementation);
  if (row == entries_.end()) return 0;
  auto cell = row->second.find(feature);
  return cell == row->second.end() ? 0 : cell->second;
}

FeatureSet ScenarioConfig::signature(std::string_view x) const {
  return signature_rules.apply(x, alphabet.pad());
}

FeatureSet ScenarioConfig::warrant(std::string_view x) const {
  return warrant_rules.apply(x, alphabet.pad());
}

FeatureSet ScenarioConfig::feature_universe() const {
  FeatureSet universe;
  for (const auto* table : {&signature_rules, &warrant_rules}) {
    for (const auto& rule : table->rules) {
      universe.insert(rule.features.begin(), rule.features.end());
    }
  }
  for (const auto& [impl, row] : compat.entries()) {
    for (const auto& [feature, value] : row) universe.insert(feature);
  }
  universe.insert(witness_kit.s0);
  return universe;
}

ScenarioConfig default_scenario() {
  const Feature dyn{"dyn"};
  const Feature sorted{"sorted"};
  ScenarioConfig cfg{
      Alphabet({'a', 'b', '#'}, '#'),
      RuleTable{{FeatureRule{PatternKind::kPadded, "a", {dyn, sorted}},
                 FeatureRule{PatternKind::kDefault, "", {sorted}}}},
      RuleTable{{FeatureRule{PatternKind::kPadded, "a", {sorted}},
                 FeatureRule{PatternKind::kDefault, "", {sorted}}}},
      CompatTable{},
      WitnessKit{"a", dyn, "YDyn", ""},
  };
  cfg.compat.set("YDyn", dyn, +1);
  cfg.compat.set("YDyn", sorted, 0);
  cfg.compat.set("YStatic", dyn, -1);
  cfg.compat.set("YStatic", sorted, +1);
  return cfg;
}

int compatibility_score(std::string_view x, std::string_view y,
                        const ScenarioConfig& cfg) {
  require_instance(x, cfg.alphabet);
  int total = 0;
  for (const auto& s : cfg.signature(x)) total += cfg.compat.value(y, s);
  return total;
}

int beyond_warrant_score(std::string_view x, std::string_view y,
                         const ScenarioConfig& cfg) {
  require_instance(x, cfg.alphabet);
  const FeatureSet warranted = cfg.warrant(x);
  int total = 0;
  for (const auto& s : cfg.signature(x)) {
    if (!warranted.contains(s)) total += cfg.compat.value(y, s);
  }
  return total;
}

ValidationReport validate_scenario(const ScenarioConfig& cfg,
                                   std::size_t check_bound) {
  ValidationReport report;
  report.check_bound = check_bound;
  const auto& kit = cfg.witness_kit;
  const char pad = cfg.alphabet.pad();

  auto check_subset = [&](const std::string& x,
                          std::optional<std::size_t> depth) {
    const FeatureSet s = cfg.signature(x);
    for (const auto& w : cfg.warrant(x)) {
      if (!s.contains(w)) {
        report.violations.push_back(
            {"warrant_subset_of_signature",
             "W(x) = " + join(cfg.warrant(x)) + " is not a subset of S(x) = " +
                 join(s),
             x, depth, w.label});
        return;
      }
    }
  };

  if (!cfg.alphabet.accepts(kit.x0)) {
    report.violations.push_back(
        {"witness_x0_in_alphabet", "x0 contains a symbol outside the alphabet",
         kit.x0, std::nullopt, std::nullopt});
  }

  // Exhaustive subset law over Σ^{≤bound}.
  const std::uint64_t total = domain_size(cfg.alphabet, check_bound);
  std::string x;
  for (std::uint64_t i = 0; i < total; ++i, next_instance(cfg.alphabet, x)) {
    check_subset(x, std::nullopt);
    ++report.instances_checked;
  }

  const FeatureSet s_base = cfg.signature(kit.x0);
  const FeatureSet w_base = cfg.warrant(kit.x0);
  std::string padded = kit.x0;
  for (std::size_t n = 0; n <= check_bound; ++n, padded.push_back(pad)) {
    check_subset(padded, n);
    const FeatureSet s = cfg.signature(padded);
    const FeatureSet w = cfg.warrant(padded);
    if (!s.contains(kit.s0) || w.contains(kit.s0)) {
      report.violations.push_back(
          {"witness_s0_beyond_warrant",
           "s0 is not in S(x0·pad^n) \\ W(x0·pad^n); S = " + join(s) +
               ", W = " + join(w),
           padded, n, kit.s0.label});
    }
    if (s != s_base || w != w_base) {
      report.violations.push_back(
          {"padding_invariance",
           "S or W changes when padding x0: S = " + join(s) +
               ", W = " + join(w),
           padded, n, std::nullopt});
    }
  }

  if (cfg.compat.value(kit.y_plus, kit.s0) != 1) {
    report.violations.push_back(
        {"witness_y_plus", "V(y_plus, s0) must be +1, got " +
                               std::to_string(cfg.compat.value(kit.y_plus,
                                                               kit.s0)),
         std::nullopt, std::nullopt, kit.s0.label});
  }
  for (const auto& s : cfg.feature_universe()) {
    if (cfg.compat.value(kit.epsilon, s) != 0) {
      report.violations.push_back(
          {"witness_epsilon_neutral", "V(epsilon, s) must be 0",
           std::nullopt, std::nullopt, s.label});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

std::string single_char_string(char c) { return std::string(1, c); }

char single_char(const json& value, const char* what) {
  if (!value.is_string() || value.get<std::string>().size() != 1) {
    throw InputError(std::string(what) + " must be a one-character string");
  }
  return value.get<std::string>()[0];
}

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw InputError(std::string("scenario is missing key '") + key + "'");
  }
  return doc.at(key);
}

const char* kind_name(PatternKind kind) {
  switch (kind) {
    case PatternKind::kEquals:
      return "equals";
    case PatternKind::kPadded:
      return "padded";
    case PatternKind::kDefault:
      return "default";
  }
  return "default";
}

json rules_to_json(const RuleTable& table) {
  json out = json::array();
  for (const auto& rule : table.rules) {
    json features = json::array();
    for (const auto& f : rule.features) features.push_back(f.label);
    json entry{{"match", kind_name(rule.kind)}, {"features", features}};
    if (rule.kind != PatternKind::kDefault) entry["literal"] = rule.literal;
    out.push_back(std::move(entry));
  }
  return out;
}

RuleTable rules_from_json(const json& doc, const char* what) {
  if (!doc.is_array()) throw InputError(std::string(what) + " must be a list");
  RuleTable table;
  for (const auto& entry : doc) {
    FeatureRule rule;
    const std::string match = require(entry, "match").get<std::string>();
    if (match == "equals") {
      rule.kind = PatternKind::kEquals;
    } else if (match == "padded") {
      rule.kind = PatternKind::kPadded;
    } else if (match == "default") {
      rule.kind = PatternKind::kDefault;
    } else {
      throw InputError(std::string(what) + ": unknown match kind '" + match +
                       "'");
    }
    if (rule.kind != PatternKind::kDefault) {
      rule.literal = require(entry, "literal").get<std::string>();
    }
    for (const auto& f : require(entry, "features")) {
      Feature feature{f.get<std::string>()};
      if (feature.label.empty()) throw InputError("feature label is empty");
      rule.features.insert(std::move(feature));
    }
    table.rules.push_back(std::move(rule));
  }
  return table;
}

}  // namespace

nlohmann::json to_json(const ScenarioConfig& cfg) {
  json alphabet = json::array();
  for (char c : cfg.alphabet.symbols()) {
    alphabet.push_back(single_char_string(c));
  }
  json compat = json::object();
  for (const auto& [impl, row] : cfg.compat.entries()) {
    json cells = json::object();
    for (const auto& [feature, value] : row) cells[feature.label] = value;
    compat[impl] = std::move(cells);
  }
  const auto& kit = cfg.witness_kit;
  return json{
      {"alphabet", alphabet},
      {"pad", single_char_string(cfg.alphabet.pad())},
      {"signature_rules", rules_to_json(cfg.signature_rules)},
      {"warrant_rules", rules_to_json(cfg.warrant_rules)},
      {"compat", compat},
      {"witness_kit",
       {{"x0", kit.x0},
        {"s0", kit.s0.label},
        {"y_plus", kit.y_plus},
        {"epsilon", kit.epsilon}}},
  };
}

nlohmann::json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    json entry{{"check", v.check}, {"detail", v.detail}};
    if (v.instance) entry["instance"] = *v.instance;
    if (v.pad_depth) entry["pad_depth"] = *v.pad_depth;
    if (v.feature) entry["feature"] = *v.feature;
    violations.push_back(std::move(entry));
  }
  return json{{"ok", report.ok()},
              {"check_bound", report.check_bound},
              {"instances_checked", report.instances_checked},
              {"violations", violations}};
}

ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  try {
    std::vector<char> symbols;
    for (const auto& s : require(doc, "alphabet")) {
      symbols.push_back(single_char(s, "alphabet symbol"));
    }
    Alphabet alphabet(std::move(symbols),
                      single_char(require(doc, "pad"), "pad"));
    CompatTable compat;
    const json& compat_doc = require(doc, "compat");
    if (!compat_doc.is_object()) throw InputError("compat must be an object");
    for (const auto& [impl, row] : compat_doc.items()) {
      for (const auto& [feature, value] : row.items()) {
        compat.set(impl, Feature{feature}, value.get<int>());
      }
    }
    const json& kit = require(doc, "witness_kit");
    WitnessKit witness{
        require(kit, "x0").get<std::string>(),
        Feature{require(kit, "s0").get<std::string>()},
        require(kit, "y_plus").get<std::string>(),
        kit.value("epsilon", std::string()),
    };
    return ScenarioConfig{
        std::move(alphabet),
        rules_from_json(require(doc, "signature_rules"), "signature_rules"),
        rules_from_json(require(doc, "warrant_rules"), "warrant_rules"),
        std::move(compat),
        std::move(witness),
    };
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed scenario: ") + e.what());
  }
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

ScenarioConfig parse_scenario(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace overspec
