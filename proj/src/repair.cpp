#include "overspec/repair.hpp"

#include <limits>

#include "overspec/errors.hpp"
#include "overspec/kleene.hpp"

namespace overspec {
namespace {

std::string const_node(std::string_view literal) {
  return "(CONST " + encode_literal(literal) + ")";
}

bool in_pad_family(std::string_view x, const ScenarioConfig& cfg) {
  FeatureRule rule{PatternKind::kPadded, cfg.witness_kit.x0, {}};
  return rule.matches(x, cfg.alphabet.pad());
}

nlohmann::json outcome_json(const EvalOutcome& r) {
  nlohmann::json j;
  j["status"] = status_name(r.status);
  j["output"] = r.halted() ? nlohmann::json(r.output) : nlohmann::json(nullptr);
  j["steps_used"] = r.steps_used;
  return j;
}

}  // namespace

const char* kind_name(RepairKind kind) {
  switch (kind) {
    case RepairKind::kSyntactic:
      return "SYNTACTIC";
    case RepairKind::kDetectorBacked:
      return "DETECTOR_BACKED";
    case RepairKind::kHostCustom:
      return "HOST_CUSTOM";
  }
  return "?";
}

RepairOperator identity_repair() {
  RepairOperator op;
  op.name = "identity";
  op.kind = RepairKind::kSyntactic;
  op.transform = [](const std::string& e, OracleCall&) { return e; };
  op.conservative = true;
  return op;
}

RepairOperator literal_rewriter_repair(const ScenarioConfig& cfg) {
  RepairOperator op;
  op.name = "literal-rewriter";
  op.kind = RepairKind::kSyntactic;
  op.transform = [from = cfg.witness_kit.y_plus,
                  to = cfg.witness_kit.epsilon](const std::string& e,
                                                OracleCall&) {
    Node ast;
    try {
      ast = parse_program(e);
    } catch (const SyntaxError&) {
      return e;
    }
    std::vector<Node*> todo{&ast};
    while (!todo.empty()) {
      Node* n = todo.back();
      todo.pop_back();
      if (n->op == Op::kConst && n->text == from) n->text = to;
      for (auto& k : n->kids) todo.push_back(&k);
    }
    return canonical_text(ast);
  };
  return op;
}

RepairOperator constant_epsilon_repair(const ScenarioConfig& cfg) {
  RepairOperator op;
  op.name = "constant-epsilon";
  op.kind = RepairKind::kSyntactic;
  op.transform = [target = const_node(cfg.witness_kit.epsilon)](
                     const std::string&, OracleCall&) { return target; };
  return op;
}

RepairOperator detector_backed_repair(const ScenarioConfig& cfg,
                                      DetectionCap cap) {
  RepairOperator op;
  op.name = "detector-backed";
  op.kind = RepairKind::kDetectorBacked;
  op.internal_detection_cap = cap;
  op.conservative = true;
  op.transform = [cfg, cap](const std::string& e, OracleCall& call) {
    std::optional<ProgramIndex> current;
    try {
      current.emplace(e);
    } catch (const SyntaxError&) {
      return e;
    }
    const std::uint64_t domain = domain_size(cfg.alphabet, cap.n);
    const std::string eps = const_node(cfg.witness_kit.epsilon);
    const char pad = cfg.alphabet.pad();
    // Each round removes at least one domain instance from the witness set.
    for (std::uint64_t round = 0; round <= domain; ++round) {
      std::optional<std::string> witness;
      std::string x;
      for (std::uint64_t i = 0; i < domain; ++i) {
        EvalOutcome r = call.evaluate(*current, x, cap.budget);
        if (!r.halted()) return e;
        if (beyond_warrant_score(x, r.output, cfg) > 0) {
          witness = x;
          break;
        }
        next_instance(cfg.alphabet, x);
      }
      if (!witness) return round == 0 ? e : current->text();
      std::string stem = *witness;
      while (!stem.empty() && stem.back() == pad) stem.pop_back();
      current.emplace("(IF (MATCH_PAD " + encode_literal(stem) + ") " + eps +
                      " " + current->text() + ")");
    }
    return e;
  };
  return op;
}

RepairOperator host_custom_repair(
    std::string name, std::function<std::string(const std::string&)> f) {
  RepairOperator op;
  op.name = std::move(name);
  op.kind = RepairKind::kHostCustom;
  op.transform = [f = std::move(f)](const std::string& e, OracleCall&) {
    return f(e);
  };
  return op;
}

std::vector<RepairOperator> builtin_repair_operators(const ScenarioConfig& cfg) {
  return {identity_repair(), literal_rewriter_repair(cfg),
          constant_epsilon_repair(cfg), detector_backed_repair(cfg)};
}

RepairOperator find_repair_operator(const ScenarioConfig& cfg,
                                    std::string_view name) {
  for (auto& op : builtin_repair_operators(cfg)) {
    if (op.name == name) return op;
  }
  throw InputError("unknown repair operator '" + std::string(name) +
                   "' (known: identity, literal-rewriter, constant-epsilon, "
                   "detector-backed)");
}

std::string gadget_text(std::string_view e, const ScenarioConfig& cfg) {
  const WitnessKit& kit = cfg.witness_kit;
  const std::string self = const_node(e);
  const std::string eps = const_node(kit.epsilon);
  return "(IF (MATCH_PAD " + encode_literal(kit.x0) + ") (IF (EQ (ORACLE " +
         kPhiOracle + " " + self + ") " + self + ") " +
         const_node(kit.y_plus) + " " + eps + ") " + eps + ")";
}

OracleFn make_gadget_map(const ScenarioConfig& cfg) {
  return text_oracle(
      [cfg](const std::string& e) { return gadget_text(e, cfg); });
}

OracleRegistry repair_registry(const RepairOperator& phi,
                               const ScenarioConfig& cfg) {
  OracleRegistry registry;
  registry.add(kPhiOracle, [transform = phi.transform](const std::string& e,
                                                       OracleCall& call) {
    return transform(e, call);
  });
  registry.add(kGadgetOracle, make_gadget_map(cfg));
  return registry;
}

Interpreter repair_interpreter(const RepairOperator& phi,
                               const ScenarioConfig& cfg) {
  return Interpreter(repair_registry(phi, cfg), cfg.alphabet.pad());
}

std::string apply_repair(const RepairOperator& phi, const std::string& e,
                         const Interpreter& vm) {
  Fuel fuel(std::numeric_limits<std::uint64_t>::max());
  OracleCall call(vm, fuel);
  return phi.transform(e, call);
}

FixedPointReport construct_overspecified_fixed_point(
    const RepairOperator& phi, const ScenarioConfig& cfg, std::size_t n_cap,
    std::uint64_t budget, std::size_t spot_check_len) {
  const Interpreter vm = repair_interpreter(phi, cfg);
  FixedPointReport report{phi.name,
                          kleene_fixed_point(kGadgetOracle, vm.registry()),
                          {}, false, {}, {}, true, false};
  const std::string& e_star = report.e_star.text();
  report.phi_of_e_star = apply_repair(phi, e_star, vm);
  report.phi_of_e_star_equals_e_star = report.phi_of_e_star == e_star;
  report.detection =
      decide_overspecification(report.e_star, n_cap, cfg, budget, vm);
  report.witness_in_pad_family =
      report.detection.witness && in_pad_family(*report.detection.witness, cfg);

  const ProgramIndex g_of_e_star(gadget_text(e_star, cfg));
  const std::uint64_t count = domain_size(cfg.alphabet, spot_check_len);
  std::string x;
  for (std::uint64_t i = 0; i < count; ++i) {
    SpotCheck s;
    s.instance = x;
    s.e_star = vm.eval(report.e_star, x, budget);
    s.gadget = vm.eval(g_of_e_star, x, budget);
    s.agree = s.e_star.status == s.gadget.status &&
              s.e_star.output == s.gadget.output;
    if (!in_pad_family(x, cfg)) {
      s.branch = "pad-mismatch";
    } else {
      s.branch =
          report.phi_of_e_star_equals_e_star ? "fixed-point" : "moved";
    }
    report.spot_checks_agree = report.spot_checks_agree && s.agree;
    report.spot_checks.push_back(std::move(s));
    next_instance(cfg.alphabet, x);
  }
  return report;
}

namespace {

AuditReport audit(const RepairOperator& phi,
                  const std::vector<ProgramIndex>& programs, std::size_t n_cap,
                  const ScenarioConfig& cfg, std::uint64_t budget,
                  bool conservativeness) {
  const Interpreter vm = repair_interpreter(phi, cfg);
  AuditReport report;
  report.phi_name = phi.name;
  report.check = conservativeness ? "conservativeness" : "uniform-elimination";
  for (const auto& e : programs) {
    AuditEntry entry;
    entry.program = e.text();
    DetectionReport before = decide_overspecification(e, n_cap, cfg, budget, vm);
    entry.verdict = before.verdict;
    entry.budget_exceeded = !before.budget_exceeded_on.empty();
    entry.repaired = apply_repair(phi, e.text(), vm);
    std::optional<ProgramIndex> repaired;
    try {
      repaired.emplace(entry.repaired);
    } catch (const SyntaxError&) {
    }
    if (repaired) {
      DetectionReport after =
          decide_overspecification(*repaired, n_cap, cfg, budget, vm);
      entry.repaired_verdict = after.verdict;
      entry.budget_exceeded =
          entry.budget_exceeded || !after.budget_exceeded_on.empty();
    }
    if (conservativeness) {
      if (entry.verdict == 0 && entry.repaired != entry.program) {
        report.violations.push_back(entry.program);
      }
    } else if (!repaired || entry.repaired_verdict != 0) {
      report.violations.push_back(entry.program);
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace

AuditReport check_conservative_on_domain(const RepairOperator& phi,
                                         const std::vector<ProgramIndex>& programs,
                                         std::size_t n_cap,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget) {
  return audit(phi, programs, n_cap, cfg, budget, true);
}

AuditReport check_uniform_elimination_on_domain(
    const RepairOperator& phi, const std::vector<ProgramIndex>& programs,
    std::size_t n_cap, const ScenarioConfig& cfg, std::uint64_t budget) {
  return audit(phi, programs, n_cap, cfg, budget, false);
}

nlohmann::json to_json(const FixedPointReport& report) {
  nlohmann::json j;
  j["phi"] = report.phi_name;
  j["e_star"] = report.e_star.text();
  j["phi_of_e_star"] = report.phi_of_e_star;
  j["phi_of_e_star_equals_e_star"] = report.phi_of_e_star_equals_e_star;
  j["detection"] = to_json(report.detection);
  j["witness_in_pad_family"] = report.witness_in_pad_family;
  j["spot_checks_agree"] = report.spot_checks_agree;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& s : report.spot_checks) {
    checks.push_back({{"instance", s.instance},
                      {"e_star", outcome_json(s.e_star)},
                      {"gadget", outcome_json(s.gadget)},
                      {"agree", s.agree},
                      {"branch", s.branch}});
  }
  j["spot_checks"] = std::move(checks);
  return j;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json j;
  j["phi"] = report.phi_name;
  j["check"] = report.check;
  j["ok"] = report.ok();
  j["violations"] = report.violations;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"program", e.program},
                       {"verdict", e.verdict},
                       {"repaired", e.repaired},
                       {"repaired_verdict", e.repaired_verdict},
                       {"budget_exceeded", e.budget_exceeded}});
  }
  j["entries"] = std::move(entries);
  return j;
}

}  // namespace overspec
