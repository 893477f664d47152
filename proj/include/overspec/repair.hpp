#pragma once

// Repair operators, the self-referential gadget family, and the
// overspecified-fixed-point construction.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "overspec/detector.hpp"
#include "overspec/program.hpp"
#include "overspec/scenario.hpp"
#include "overspec/vm.hpp"

namespace overspec {

inline constexpr const char* kPhiOracle = "PHI";
inline constexpr const char* kGadgetOracle = "G";

enum class RepairKind { kSyntactic, kDetectorBacked, kHostCustom };

const char* kind_name(RepairKind kind);

struct DetectionCap {
  std::size_t n = 3;
  std::uint64_t budget = 4096;
};

// A total map on program texts. The transform receives the OracleCall of
// the evaluation that invoked it (or a host-level call with unbounded fuel)
// and must pay for any evaluation through it.
struct RepairOperator {
  using Transform =
      std::function<std::string(const std::string& e, OracleCall& call)>;

  std::string name;
  RepairKind kind = RepairKind::kSyntactic;
  Transform transform;
  std::optional<DetectionCap> internal_detection_cap;
  // Whether Φ(e) = e is promised for every e with bounded verdict 0.
  bool conservative = false;
};

RepairOperator identity_repair();
// Rewrites every (CONST y_plus) node to (CONST ε). Not conservative.
RepairOperator literal_rewriter_repair(const ScenarioConfig& cfg);
// Maps every program to (CONST ε). Not conservative.
RepairOperator constant_epsilon_repair(const ScenarioConfig& cfg);
// Bounded detection within `cap`; on a witness, guards the program so it
// outputs ε on the witness's pad family and repeats. Returns e unchanged on
// verdict 0 or as soon as any internal evaluation diverges.
RepairOperator detector_backed_repair(const ScenarioConfig& cfg,
                                      DetectionCap cap = {});
RepairOperator host_custom_repair(std::string name,
                                  std::function<std::string(const std::string&)> f);

// identity, literal-rewriter, constant-epsilon, detector-backed.
std::vector<RepairOperator> builtin_repair_operators(const ScenarioConfig& cfg);
// Throws InputError for an unknown name.
RepairOperator find_repair_operator(const ScenarioConfig& cfg,
                                    std::string_view name);

// G(e) = (IF (MATCH_PAD x0) (IF (EQ (ORACLE PHI (CONST e)) (CONST e))
//            (CONST y_plus) (CONST ε)) (CONST ε))
std::string gadget_text(std::string_view e, const ScenarioConfig& cfg);
OracleFn make_gadget_map(const ScenarioConfig& cfg);

// Registry binding PHI to `phi` and G to the gadget map.
OracleRegistry repair_registry(const RepairOperator& phi,
                               const ScenarioConfig& cfg);
Interpreter repair_interpreter(const RepairOperator& phi,
                               const ScenarioConfig& cfg);

// Applies phi outside any evaluation, with unbounded fuel.
std::string apply_repair(const RepairOperator& phi, const std::string& e,
                         const Interpreter& vm);

struct SpotCheck {
  std::string instance;
  EvalOutcome e_star;
  EvalOutcome gadget;
  bool agree = false;
  // "pad-mismatch", "fixed-point" or "moved".
  std::string branch;
};

struct FixedPointReport {
  std::string phi_name;
  ProgramIndex e_star;
  std::string phi_of_e_star;
  bool phi_of_e_star_equals_e_star = false;
  DetectionReport detection;
  std::vector<SpotCheck> spot_checks;
  bool spot_checks_agree = true;
  // Witness lies in the x0·#^n family.
  bool witness_in_pad_family = false;
};

FixedPointReport construct_overspecified_fixed_point(
    const RepairOperator& phi, const ScenarioConfig& cfg, std::size_t n_cap,
    std::uint64_t budget, std::size_t spot_check_len = 3);

struct AuditEntry {
  std::string program;
  int verdict = 0;
  std::string repaired;
  int repaired_verdict = 0;
  bool budget_exceeded = false;
};

struct AuditReport {
  std::string phi_name;
  std::string check;
  std::vector<AuditEntry> entries;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Every program with bounded verdict 0 must satisfy Φ(e) = e.
AuditReport check_conservative_on_domain(const RepairOperator& phi,
                                         const std::vector<ProgramIndex>& programs,
                                         std::size_t n_cap,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget);

// Every Φ(e) must have bounded verdict 0.
AuditReport check_uniform_elimination_on_domain(
    const RepairOperator& phi, const std::vector<ProgramIndex>& programs,
    std::size_t n_cap, const ScenarioConfig& cfg, std::uint64_t budget);

nlohmann::json to_json(const FixedPointReport& report);
nlohmann::json to_json(const AuditReport& report);

}  // namespace overspec
