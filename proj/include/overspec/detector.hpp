#pragma once

// Bounded overspecification detection, the dovetailing semi-decider, and
// the halting-reduction gadget.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "overspec/program.hpp"
#include "overspec/scenario.hpp"
#include "overspec/turing.hpp"
#include "overspec/vm.hpp"

namespace overspec {

// One scanned instance.
struct ScanRow {
  std::string instance;
  EvalStatus status = EvalStatus::kDiverged;
  std::string output;
  // 0 for diverged evaluations.
  int v_bw = 0;
  std::uint64_t steps = 0;
};

struct DetectionReport {
  int verdict = 0;
  std::optional<std::string> witness;
  std::uint64_t instances_scanned = 0;
  std::size_t n_cap = 0;
  // N_n = |Σ^{≤n}|.
  std::uint64_t domain_size = 0;
  std::uint64_t eval_steps_total = 0;
  std::vector<std::string> budget_exceeded_on;
  // Filled only when DetectOptions::keep_rows is set.
  std::vector<ScanRow> rows;
};

struct DetectOptions {
  // Worker threads for the scan; the reported witness is the length-lex
  // first one regardless.
  unsigned jobs = 1;
  bool keep_rows = false;
};

// Scans Σ^{≤n} in length-lex order, stopping at the first instance whose
// output has positive beyond-warrant score. Diverged evaluations are listed
// and treated as non-witnesses. Requires budget >= 1 and vm.pad() equal to
// the scenario pad (ConfigError otherwise).
DetectionReport decide_overspecification(const ProgramIndex& f, std::size_t n,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget,
                                         const Interpreter& vm,
                                         const DetectOptions& options = {});

// Parses `f_text` first; throws InputError when it does not parse.
DetectionReport decide_overspecification(std::string_view f_text,
                                         std::size_t n,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget,
                                         const Interpreter& vm,
                                         const DetectOptions& options = {});

// f_{M,w}: on x = x0·#^n output y_plus if M halts on w within n² steps,
// otherwise ε. The program is EVAL/ORACLE-free. Throws InputError when w
// uses symbols outside the machine's tape alphabet.
ProgramIndex build_halting_gadget(const TuringMachine& tm, std::string_view w,
                                  const ScenarioConfig& cfg);

enum class SemiStatus { kAccepted, kExhausted };

struct SemiDecisionOutcome {
  SemiStatus status = SemiStatus::kExhausted;
  std::optional<std::string> witness;
  std::uint64_t stage_reached = 0;
  // Interpreter invocations performed (differs between modes).
  std::uint64_t evaluations = 0;
};

enum class SemiMode {
  // Uses budget monotonicity to avoid re-running instances whose status at
  // the current stage is already known. Same outcome as kNaive.
  kMemoized,
  // Literal dovetailing: every stage re-runs x_0..x_t with budget t.
  kNaive,
};

// Stage t evaluates f on the first t+1 instances of Σ* with budget t
// (stage 0 runs nothing) and accepts on the first output with positive
// beyond-warrant score, reporting the earliest such instance of that stage.
// Scoring is not charged to the stage budget.
SemiDecisionOutcome semidecide_overspecified(const ProgramIndex& f,
                                             const ScenarioConfig& cfg,
                                             std::uint64_t stage_limit,
                                             const Interpreter& vm,
                                             SemiMode mode = SemiMode::kMemoized);

struct CrossCheckReport {
  DetectionReport detection;
  SemiDecisionOutcome semi;
  bool consistent = true;
  std::vector<std::string> issues;
};

CrossCheckReport cross_check(const ProgramIndex& f, std::size_t n,
                             const ScenarioConfig& cfg, std::uint64_t budget,
                             std::uint64_t stage_limit, const Interpreter& vm);

const char* status_name(EvalStatus s);
const char* status_name(SemiStatus s);

nlohmann::json to_json(const DetectionReport& report);
nlohmann::json to_json(const SemiDecisionOutcome& outcome);
nlohmann::json to_json(const CrossCheckReport& report);

// Header plus one row per scanned instance: instance,status,output,v_bw,steps.
std::string scan_rows_csv(const DetectionReport& report);

}  // namespace overspec
