#include "overspec/detector.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>

#include "overspec/errors.hpp"
#include "overspec/format.hpp"

namespace overspec {
namespace {

constexpr std::uint64_t kChunk = 64;

ScanRow scan_one(const ProgramIndex& f, std::string x,
                 const ScenarioConfig& cfg, std::uint64_t budget,
                 const Interpreter& vm) {
  EvalOutcome r = vm.eval(f, x, budget);
  ScanRow row;
  row.status = r.status;
  row.steps = r.steps_used;
  if (r.halted()) {
    row.v_bw = beyond_warrant_score(x, r.output, cfg);
    row.output = std::move(r.output);
  }
  row.instance = std::move(x);
  return row;
}

bool is_witness(const ScanRow& row) {
  return row.status == EvalStatus::kHalted && row.v_bw > 0;
}

void account(DetectionReport& report, ScanRow row, bool keep) {
  ++report.instances_scanned;
  report.eval_steps_total += row.steps;
  if (row.status == EvalStatus::kDiverged) {
    report.budget_exceeded_on.push_back(row.instance);
  }
  if (is_witness(row)) {
    report.verdict = 1;
    report.witness = row.instance;
  }
  if (keep) report.rows.push_back(std::move(row));
}

void scan_parallel(const ProgramIndex& f, const ScenarioConfig& cfg,
                   std::uint64_t budget, const Interpreter& vm,
                   const DetectOptions& options, DetectionReport& report) {
  const std::uint64_t total = report.domain_size;
  std::vector<std::optional<ScanRow>> rows(total);
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> first_witness{total};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    try {
      while (true) {
        const std::uint64_t begin = next_chunk.fetch_add(1) * kChunk;
        if (begin >= total || begin > first_witness.load()) return;
        const std::uint64_t end = std::min(total, begin + kChunk);
        std::string x = instance_at(cfg.alphabet, begin);
        for (std::uint64_t i = begin; i < end; ++i) {
          if (i > first_witness.load()) break;
          ScanRow row = scan_one(f, x, cfg, budget, vm);
          if (is_witness(row)) {
            std::uint64_t seen = first_witness.load();
            while (i < seen && !first_witness.compare_exchange_weak(seen, i)) {
            }
          }
          rows[i] = std::move(row);
          next_instance(cfg.alphabet, x);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      first_witness.store(0);
    }
  };

  std::vector<std::thread> pool;
  for (unsigned j = 0; j < options.jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  // Reduce in enumeration order, up to and including the first witness.
  for (std::uint64_t i = 0; i < total; ++i) {
    if (!rows[i]) throw InvariantViolation("parallel scan left a gap");
    account(report, std::move(*rows[i]), options.keep_rows);
    if (report.verdict == 1) break;
  }
}

std::string const_node(std::string_view literal) {
  return "(CONST " + encode_literal(literal) + ")";
}

}  // namespace

const char* status_name(EvalStatus s) {
  return s == EvalStatus::kHalted ? "HALTED" : "DIVERGED";
}

const char* status_name(SemiStatus s) {
  return s == SemiStatus::kAccepted ? "ACCEPTED" : "EXHAUSTED";
}

DetectionReport decide_overspecification(const ProgramIndex& f, std::size_t n,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget,
                                         const Interpreter& vm,
                                         const DetectOptions& options) {
  if (budget == 0) throw std::invalid_argument("detection budget must be >= 1");
  if (vm.pad() != cfg.alphabet.pad()) {
    throw ConfigError("interpreter pad differs from scenario pad");
  }
  DetectionReport report;
  report.n_cap = n;
  report.domain_size = domain_size(cfg.alphabet, n);

  if (options.jobs > 1 && report.domain_size > kChunk) {
    scan_parallel(f, cfg, budget, vm, options, report);
    return report;
  }
  std::string x;
  for (std::uint64_t i = 0; i < report.domain_size; ++i) {
    account(report, scan_one(f, x, cfg, budget, vm), options.keep_rows);
    if (report.verdict == 1) break;
    next_instance(cfg.alphabet, x);
  }
  return report;
}

DetectionReport decide_overspecification(std::string_view f_text,
                                         std::size_t n,
                                         const ScenarioConfig& cfg,
                                         std::uint64_t budget,
                                         const Interpreter& vm,
                                         const DetectOptions& options) {
  return decide_overspecification(ProgramIndex(f_text), n, cfg, budget, vm,
                                  options);
}

ProgramIndex build_halting_gadget(const TuringMachine& tm, std::string_view w,
                                  const ScenarioConfig& cfg) {
  for (char c : w) {
    if (std::find(tm.alphabet().begin(), tm.alphabet().end(), c) ==
        tm.alphabet().end()) {
      throw InputError(std::string("input symbol '") + c +
                       "' is not in the machine's tape alphabet");
    }
  }
  const WitnessKit& kit = cfg.witness_kit;
  const std::string x0 = encode_literal(kit.x0);
  const std::string eps = const_node(kit.epsilon);
  std::string text = "(IF (MATCH_PAD " + x0 + ") (IF (SIM_TM " + tm.compact() +
                     " " + const_node(w) + " (SQ (PAD_COUNT " + x0 + "))) " +
                     const_node(kit.y_plus) + " " + eps + ") " + eps + ")";
  ProgramIndex gadget(text);
  if (!is_total_fragment(gadget.ast())) {
    throw InvariantViolation("halting gadget left the total fragment");
  }
  return gadget;
}

namespace {

SemiDecisionOutcome semidecide_naive(const ProgramIndex& f,
                                     const ScenarioConfig& cfg,
                                     std::uint64_t stage_limit,
                                     const Interpreter& vm) {
  SemiDecisionOutcome out;
  std::vector<std::string> instances;
  std::string next;
  for (std::uint64_t t = 0; t <= stage_limit; ++t) {
    instances.push_back(next);
    next_instance(cfg.alphabet, next);
    if (t == 0) continue;
    for (const auto& x : instances) {
      ++out.evaluations;
      EvalOutcome r = vm.eval(f, x, t);
      if (r.halted() && beyond_warrant_score(x, r.output, cfg) > 0) {
        out.status = SemiStatus::kAccepted;
        out.witness = x;
        out.stage_reached = t;
        return out;
      }
    }
  }
  out.stage_reached = stage_limit;
  return out;
}

// An instance x_j is first seen halting at stage max(j, h_j), where h_j is
// the least budget on which it halts; by budget monotonicity h_j can be
// found by probing with growing budgets and bisecting, instead of
// re-running x_j at every stage.
SemiDecisionOutcome semidecide_memoized(const ProgramIndex& f,
                                        const ScenarioConfig& cfg,
                                        std::uint64_t stage_limit,
                                        const Interpreter& vm) {
  using Event = std::pair<std::uint64_t, std::uint64_t>;  // (stage, j)
  using MinHeap =
      std::priority_queue<Event, std::vector<Event>, std::greater<>>;
  SemiDecisionOutcome out;
  std::vector<std::string> instances;
  std::vector<std::uint64_t> lower;  // instance diverged at this budget
  MinHeap probes;
  MinHeap due;  // witnesses, keyed by the stage they are first seen
  std::string next;

  auto halts = [&](std::uint64_t j, std::uint64_t budget,
                   std::string* output) {
    ++out.evaluations;
    EvalOutcome r = vm.eval(f, instances[j], budget);
    if (r.halted() && output) *output = std::move(r.output);
    return r.halted();
  };
  auto settle = [&](std::uint64_t j, std::uint64_t stage,
                    const std::string& output) {
    if (beyond_warrant_score(instances[j], output, cfg) > 0) {
      due.emplace(stage, j);
    }
  };
  auto defer = [&](std::uint64_t j, std::uint64_t budget) {
    lower[j] = budget;
    if (budget < stage_limit) probes.emplace(budget + 1, j);
  };

  for (std::uint64_t t = 0; t <= stage_limit; ++t) {
    const std::uint64_t j_new = instances.size();
    instances.push_back(next);
    lower.push_back(0);
    next_instance(cfg.alphabet, next);
    std::string output;
    if (t == 0) {
      defer(j_new, 0);
    } else if (halts(j_new, t, &output)) {
      settle(j_new, t, output);
    } else {
      defer(j_new, t);
    }

    while (!probes.empty() && probes.top().first <= t) {
      const std::uint64_t j = probes.top().second;
      probes.pop();
      const std::uint64_t reach =
          std::min(std::max(2 * lower[j], t), stage_limit);
      if (!halts(j, reach, &output)) {
        defer(j, reach);
        continue;
      }
      std::uint64_t lo = t, hi = reach;
      while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (halts(j, mid, nullptr)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      settle(j, hi, output);
    }

    if (!due.empty() && due.top().first <= t) {
      std::uint64_t best = due.top().second;
      while (!due.empty() && due.top().first <= t) {
        best = std::min(best, due.top().second);
        due.pop();
      }
      out.status = SemiStatus::kAccepted;
      out.witness = instances[best];
      out.stage_reached = t;
      return out;
    }
  }
  out.stage_reached = stage_limit;
  return out;
}

}  // namespace

SemiDecisionOutcome semidecide_overspecified(const ProgramIndex& f,
                                             const ScenarioConfig& cfg,
                                             std::uint64_t stage_limit,
                                             const Interpreter& vm,
                                             SemiMode mode) {
  if (vm.pad() != cfg.alphabet.pad()) {
    throw ConfigError("interpreter pad differs from scenario pad");
  }
  return mode == SemiMode::kNaive
             ? semidecide_naive(f, cfg, stage_limit, vm)
             : semidecide_memoized(f, cfg, stage_limit, vm);
}

CrossCheckReport cross_check(const ProgramIndex& f, std::size_t n,
                             const ScenarioConfig& cfg, std::uint64_t budget,
                             std::uint64_t stage_limit, const Interpreter& vm) {
  CrossCheckReport report;
  report.detection = decide_overspecification(f, n, cfg, budget, vm);
  report.semi = semidecide_overspecified(f, cfg, stage_limit, vm);
  const bool accepted = report.semi.status == SemiStatus::kAccepted;
  if (report.detection.verdict == 1 && !accepted) {
    report.issues.push_back(
        "bounded detection found witness '" + *report.detection.witness +
        "' but the semi-decider exhausted its stages");
  }
  if (accepted && report.semi.witness->size() <= n &&
      report.detection.verdict == 0) {
    report.issues.push_back("semi-decider witness '" + *report.semi.witness +
                            "' lies in the bounded domain but detection "
                            "returned verdict 0");
  }
  if (report.detection.verdict == 1) {
    EvalOutcome r = vm.eval(f, *report.detection.witness, budget);
    if (!r.halted() ||
        beyond_warrant_score(*report.detection.witness, r.output, cfg) <= 0) {
      report.issues.push_back("detection witness does not re-verify");
    }
  }
  report.consistent = report.issues.empty();
  return report;
}

nlohmann::json to_json(const DetectionReport& report) {
  nlohmann::json j;
  j["verdict"] = report.verdict;
  j["witness"] = report.witness ? nlohmann::json(*report.witness)
                                : nlohmann::json(nullptr);
  j["instances_scanned"] = report.instances_scanned;
  j["n_cap"] = report.n_cap;
  j["domain_size"] = report.domain_size;
  j["eval_steps_total"] = report.eval_steps_total;
  j["budget_exceeded_on"] = report.budget_exceeded_on;
  return j;
}

nlohmann::json to_json(const SemiDecisionOutcome& outcome) {
  nlohmann::json j;
  j["status"] = status_name(outcome.status);
  j["witness"] = outcome.witness ? nlohmann::json(*outcome.witness)
                                 : nlohmann::json(nullptr);
  j["stage_reached"] = outcome.stage_reached;
  j["evaluations"] = outcome.evaluations;
  return j;
}

nlohmann::json to_json(const CrossCheckReport& report) {
  nlohmann::json j;
  j["detection"] = to_json(report.detection);
  j["semidecision"] = to_json(report.semi);
  j["consistent"] = report.consistent;
  j["issues"] = report.issues;
  return j;
}

std::string scan_rows_csv(const DetectionReport& report) {
  std::string out = "instance,status,output,v_bw,steps\n";
  for (const auto& row : report.rows) {
    out += csv_field(row.instance);
    out += ',';
    out += status_name(row.status);
    out += ',';
    out += csv_field(row.output);
    out += ',';
    out += std::to_string(row.v_bw);
    out += ',';
    out += std::to_string(row.steps);
    out += '\n';
  }
  return out;
}

}  // namespace overspec
