#pragma once

// Budgeted universal evaluator for pipeline programs.
//
// Every node visit costs one step; SIM_TM additionally costs the machine
// steps it simulates, and CONCAT one extra step per 256 output bytes.
// EVAL runs the callee on the caller's remaining budget. Oracles receive an
// OracleCall through which any internal evaluation is paid for out of the
// caller's budget (see OracleCall::evaluate).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "overspec/program.hpp"

namespace overspec {

enum class EvalStatus { kHalted, kDiverged };

struct EvalOutcome {
  EvalStatus status = EvalStatus::kDiverged;
  // Present iff halted; empty otherwise.
  std::string output;
  std::uint64_t steps_used = 0;

  bool halted() const { return status == EvalStatus::kHalted; }
  bool operator==(const EvalOutcome&) const = default;
};

// Thrown to unwind an evaluation whose budget ran out. Oracles may let it
// propagate; the top-level eval converts it to a DIVERGED outcome.
struct OutOfFuel {};

class Fuel {
 public:
  explicit Fuel(std::uint64_t budget) : remaining_(budget) {}

  std::uint64_t remaining() const { return remaining_; }

  // Spends n steps, or empties the tank and throws OutOfFuel.
  void spend(std::uint64_t n) {
    if (n > remaining_) {
      remaining_ = 0;
      throw OutOfFuel{};
    }
    remaining_ -= n;
  }

 private:
  std::uint64_t remaining_;
};

class Interpreter;

// Handle given to an oracle while it runs inside an evaluation.
class OracleCall {
 public:
  OracleCall(const Interpreter& vm, Fuel& fuel) : vm_(vm), fuel_(fuel) {}

  const Interpreter& vm() const { return vm_; }
  std::uint64_t remaining() const { return fuel_.remaining(); }

  // Evaluates `program` on `input` with exactly `allowance` steps, charging
  // the steps used to the caller. If the caller has fewer than `allowance`
  // steps left, the caller itself runs out of budget (OutOfFuel), so the
  // oracle's answer never depends on how much budget the caller happened to
  // have.
  EvalOutcome evaluate(const ProgramIndex& program, std::string_view input,
                       std::uint64_t allowance);

 private:
  const Interpreter& vm_;
  Fuel& fuel_;
};

using OracleFn = std::function<std::string(const std::string&, OracleCall&)>;

class OracleRegistry {
 public:
  // Replaces any oracle already registered under `name`.
  void add(const std::string& name, OracleFn fn);
  const OracleFn* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

 private:
  std::map<std::string, OracleFn, std::less<>> oracles_;
};

class Interpreter {
 public:
  explicit Interpreter(OracleRegistry registry = {}, char pad = '#');

  // Requires budget >= 1. Throws ConfigError for an unregistered oracle.
  EvalOutcome eval(const ProgramIndex& program, std::string_view input,
                   std::uint64_t budget) const;

  // Runs inside an existing budget; throws OutOfFuel on exhaustion.
  std::string run(const ProgramIndex& program, std::string_view input,
                  Fuel& fuel) const;

  const OracleRegistry& registry() const { return *registry_; }
  char pad() const { return pad_; }

  // A copy of this interpreter with `name` bound to `fn`.
  Interpreter with_oracle(const std::string& name, OracleFn fn) const;

 private:
  std::shared_ptr<const OracleRegistry> registry_;
  char pad_;
};

}  // namespace overspec
