#include "overspec/vm.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "overspec/errors.hpp"

namespace overspec {
namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
constexpr std::size_t kConcatBytesPerStep = 256;

const std::string kTrue = "1";

// Non-numerals read as 0; overflow saturates.
std::uint64_t parse_nat(std::string_view s) {
  if (s.empty()) return 0;
  std::uint64_t value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return 0;
    std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (value > (kMax - d) / 10) return kMax;
    value = value * 10 + d;
  }
  return value;
}

std::uint64_t square(std::uint64_t n) {
  if (n != 0 && n > kMax / n) return kMax;
  return n * n;
}

// Number of pads when x = literal·pad^n, else -1.
long long pad_count(std::string_view x, std::string_view literal, char pad) {
  if (x.size() < literal.size() || x.substr(0, literal.size()) != literal) {
    return -1;
  }
  for (std::size_t i = literal.size(); i < x.size(); ++i) {
    if (x[i] != pad) return -1;
  }
  return static_cast<long long>(x.size() - literal.size());
}

struct Frame {
  const Node* node;
  std::shared_ptr<const Node> owner;
  std::shared_ptr<const std::string> input;
  std::vector<std::string> values;
  std::size_t next = 0;
  // Set once an IF branch or EVAL body has been pushed: that child's value
  // becomes this frame's value unchanged.
  bool delegated = false;
};

class Machine {
 public:
  Machine(const Interpreter& vm, Fuel& fuel) : vm_(vm), fuel_(fuel) {}

  std::string run(std::shared_ptr<const Node> root,
                  std::shared_ptr<const std::string> input) {
    const Node* node = root.get();
    push(node, std::move(root), std::move(input));
    std::string result;
    bool returning = false;
    while (true) {
      Frame& f = stack_.back();
      if (returning) {
        if (f.delegated) {
          stack_.pop_back();
          if (stack_.empty()) return result;
          continue;
        }
        f.values.push_back(std::move(result));
        result.clear();
        returning = false;
      }
      if (step(f, result)) {
        stack_.pop_back();
        if (stack_.empty()) return result;
        returning = true;
      }
    }
  }

 private:
  void push(const Node* node, std::shared_ptr<const Node> owner,
            std::shared_ptr<const std::string> input) {
    fuel_.spend(1);
    stack_.push_back(Frame{node, std::move(owner), std::move(input), {}, 0,
                           false});
  }

  void push_child(Frame& f, const Node& child) {
    auto owner = f.owner;
    auto input = f.input;
    push(&child, std::move(owner), std::move(input));
  }

  std::shared_ptr<const Node> load(const std::string& text) {
    auto hit = parsed_.find(text);
    if (hit != parsed_.end()) return hit->second;
    std::shared_ptr<const Node> ast;
    try {
      ast = std::make_shared<const Node>(parse_program(text));
    } catch (const SyntaxError&) {
      // Text that is not a program denotes the nowhere-defined function.
    }
    parsed_.emplace(text, ast);
    return ast;
  }

  // Advances frame `f` by one action. Returns true when `f` has produced its
  // value (left in `result`); false after pushing a child.
  bool step(Frame& f, std::string& result) {
    const Node& n = *f.node;
    const std::string& x = *f.input;
    switch (n.op) {
      case Op::kConst:
        result = n.text;
        return true;
      case Op::kInput:
        result = x;
        return true;
      case Op::kFirst:
      case Op::kSecond: {
        auto split = unpair(x);
        if (n.op == Op::kFirst) {
          result = split ? split->first : std::string();
        } else {
          result = split ? split->second : x;
        }
        return true;
      }
      case Op::kMatchPad:
        result = pad_count(x, n.text, vm_.pad()) >= 0 ? kTrue : std::string();
        return true;
      case Op::kPadCount: {
        long long count = pad_count(x, n.text, vm_.pad());
        result = count >= 0 ? std::to_string(count) : std::string();
        return true;
      }
      case Op::kNum:
        result = n.text;
        return true;
      case Op::kIf:
        if (f.values.empty()) {
          push_child(f, n.kids[0]);
        } else {
          const Node& branch =
              f.values[0].empty() ? n.kids[2] : n.kids[1];
          f.delegated = true;
          push_child(f, branch);
        }
        return false;
      case Op::kEval:
        if (f.next < n.kids.size()) {
          push_child(f, n.kids[f.next++]);
          return false;
        } else {
          std::shared_ptr<const Node> body = load(f.values[0]);
          if (!body) fuel_.spend(kMax);
          auto input = std::make_shared<const std::string>(
              std::move(f.values[1]));
          f.delegated = true;
          const Node* root = body.get();
          push(root, std::move(body), std::move(input));
          return false;
        }
      default:
        break;
    }
    if (f.next < n.kids.size()) {
      push_child(f, n.kids[f.next++]);
      return false;
    }
    auto& v = f.values;
    switch (n.op) {
      case Op::kConcat:
        result = v[0] + v[1];
        fuel_.spend(result.size() / kConcatBytesPerStep);
        return true;
      case Op::kEq:
        result = v[0] == v[1] ? kTrue : std::string();
        return true;
      case Op::kSq:
        result = std::to_string(square(parse_nat(v[0])));
        return true;
      case Op::kSimTm: {
        const std::uint64_t bound = parse_nat(v[1]);
        const std::uint64_t limit = std::min(bound, fuel_.remaining());
        TmRun r = n.tm->run(v[0], limit);
        fuel_.spend(r.steps);
        if (!r.halted && limit < bound && r.steps == limit) {
          fuel_.spend(1);  // out of budget before the clock ran out
        }
        result = r.halted ? kTrue : std::string();
        return true;
      }
      case Op::kSpecialize:
        result = specialize_text(v[0], v[1]);
        return true;
      case Op::kOracle: {
        const OracleFn* fn = vm_.registry().find(n.text);
        if (!fn) throw ConfigError("unknown oracle '" + n.text + "'");
        OracleCall call(vm_, fuel_);
        std::string arg = std::move(v[0]);
        result = (*fn)(arg, call);
        return true;
      }
      default:
        throw InvariantViolation("unhandled op in evaluator");
    }
  }

  const Interpreter& vm_;
  Fuel& fuel_;
  std::vector<Frame> stack_;
  std::unordered_map<std::string, std::shared_ptr<const Node>> parsed_;
};

}  // namespace

EvalOutcome OracleCall::evaluate(const ProgramIndex& program,
                                 std::string_view input,
                                 std::uint64_t allowance) {
  if (fuel_.remaining() < allowance) fuel_.spend(kMax);
  if (allowance == 0) return EvalOutcome{EvalStatus::kDiverged, {}, 0};
  EvalOutcome sub = vm_.eval(program, input, allowance);
  fuel_.spend(sub.steps_used);
  return sub;
}

void OracleRegistry::add(const std::string& name, OracleFn fn) {
  oracles_[name] = std::move(fn);
}

const OracleFn* OracleRegistry::find(std::string_view name) const {
  auto it = oracles_.find(name);
  return it == oracles_.end() ? nullptr : &it->second;
}

Interpreter::Interpreter(OracleRegistry registry, char pad)
    : registry_(std::make_shared<const OracleRegistry>(std::move(registry))),
      pad_(pad) {}

std::string Interpreter::run(const ProgramIndex& program,
                             std::string_view input, Fuel& fuel) const {
  Machine machine(*this, fuel);
  return machine.run(program.shared_ast(),
                     std::make_shared<const std::string>(input));
}

EvalOutcome Interpreter::eval(const ProgramIndex& program,
                              std::string_view input,
                              std::uint64_t budget) const {
  if (budget == 0) throw std::invalid_argument("eval budget must be >= 1");
  Fuel fuel(budget);
  try {
    std::string out = run(program, input, fuel);
    return EvalOutcome{EvalStatus::kHalted, std::move(out),
                       budget - fuel.remaining()};
  } catch (const OutOfFuel&) {
    return EvalOutcome{EvalStatus::kDiverged, {}, budget};
  }
}

Interpreter Interpreter::with_oracle(const std::string& name,
                                     OracleFn fn) const {
  OracleRegistry copy = *registry_;
  copy.add(name, std::move(fn));
  return Interpreter(std::move(copy), pad_);
}

}  // namespace overspec
