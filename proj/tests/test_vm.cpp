#include <stdexcept>

#include "doctest.h"
#include "overspec/errors.hpp"
#include "overspec/kleene.hpp"
#include "overspec/vm.hpp"
#include "support.hpp"

using namespace overspec;
using testing_support::all_strings;
using testing_support::data_path;

namespace {

const Alphabet kSigma({'a', 'b', '#'}, '#');
constexpr std::uint64_t kBig = 1'000'000;

bool same(const EvalOutcome& a, const EvalOutcome& b) {
  return a.status == b.status && a.output == b.output;
}

// Evaluates n on itself, then the resulting text on x.
EvalOutcome two_stage(const Interpreter& vm, const ProgramIndex& n,
                      const std::string& x, std::uint64_t budget) {
  EvalOutcome first = vm.eval(n, n.text(), budget);
  if (!first.halted()) return first;
  try {
    return vm.eval(ProgramIndex(first.output), x, budget);
  } catch (const SyntaxError&) {
    return EvalOutcome{EvalStatus::kDiverged, {}, budget};
  }
}

}  // namespace

TEST_CASE("eval examples") {
  Interpreter vm;
  EvalOutcome r = vm.eval(ProgramIndex("(CONST YDyn)"), "a#", 100);
  CHECK(r.halted());
  CHECK(r.output == "YDyn");

  ProgramIndex guard("(IF (MATCH_PAD a) (CONST YDyn) (CONST ))");
  CHECK(vm.eval(guard, "a##", 100).output == "YDyn");
  CHECK(vm.eval(guard, "b", 100).halted());
  CHECK(vm.eval(guard, "b", 100).output == "");

  ProgramIndex loop("(EVAL (CONST (EVAL INPUT INPUT)) (CONST (EVAL INPUT INPUT)))");
  for (const auto& x : all_strings(kSigma, 2)) {
    EvalOutcome d = vm.eval(loop, x, 10'000);
    CHECK(d.status == EvalStatus::kDiverged);
    CHECK(d.output.empty());
    CHECK(d.steps_used == 10'000);
  }
}

TEST_CASE("primitive semantics") {
  Interpreter vm;
  auto run = [&](const char* p, const std::string& x) {
    EvalOutcome r = vm.eval(ProgramIndex(p), x, kBig);
    REQUIRE(r.halted());
    return r.output;
  };
  CHECK(run("(PAD_COUNT a)", "a###") == "3");
  CHECK(run("(PAD_COUNT a)", "b###") == "");
  CHECK(run("(SQ (PAD_COUNT a))", "a###") == "9");
  CHECK(run("(SQ (CONST xyz))", "") == "0");
  CHECK(run("(SQ (NUM 9999999999999999999))", "") == "18446744073709551615");
  CHECK(run("(EQ INPUT (CONST ab))", "ab") == "1");
  CHECK(run("(EQ INPUT (CONST ab))", "a") == "");
  CHECK(run("FIRST", "2:abxy") == "ab");
  CHECK(run("SECOND", "2:abxy") == "xy");
  CHECK(run("FIRST", "junk") == "");
  CHECK(run("SECOND", "junk") == "junk");
  CHECK(run("(EVAL (CONST (CONCAT INPUT INPUT)) (CONST ab))", "") == "abab");
}

TEST_CASE("step accounting") {
  Interpreter vm;
  CHECK(vm.eval(ProgramIndex("(CONST YDyn)"), "", 1).steps_used == 1);
  CHECK(vm.eval(ProgramIndex("(CONCAT INPUT INPUT)"), "ab", 10).steps_used == 3);
  // one extra step per 256 bytes of CONCAT output
  CHECK(vm.eval(ProgramIndex("(CONCAT INPUT INPUT)"), std::string(300, 'a'), 10)
            .steps_used == 5);

  TuringMachine tm = load_turing_machine(data_path("tm/halt4.json"));
  const std::string sim = "(SIM_TM " + tm.compact() + " (CONST 111) (NUM ";
  EvalOutcome halts = vm.eval(ProgramIndex(sim + "100))"), "", 1000);
  CHECK(halts.output == "1");
  CHECK(halts.steps_used == 3 + 4);
  EvalOutcome clocked = vm.eval(ProgramIndex(sim + "3))"), "", 1000);
  CHECK(clocked.output == "");
  CHECK(clocked.steps_used == 3 + 3);
  // budget runs out inside the simulation
  CHECK(vm.eval(ProgramIndex(sim + "100))"), "", 6).status == EvalStatus::kDiverged);
  CHECK(vm.eval(ProgramIndex(sim + "100))"), "", 7).halted());
}

TEST_CASE("errors") {
  Interpreter vm;
  CHECK_THROWS_AS(vm.eval(ProgramIndex("(CONST )"), "", 0), std::invalid_argument);
  CHECK_THROWS_AS(vm.eval(ProgramIndex("(ORACLE NOPE INPUT)"), "", 10), ConfigError);
  // text that is not a program denotes the nowhere-defined function
  EvalOutcome r = vm.eval(ProgramIndex("(EVAL (CONST YDyn) INPUT)"), "", 50);
  CHECK(r.status == EvalStatus::kDiverged);
  CHECK(r.steps_used == 50);
}

TEST_CASE("budget monotonicity and determinism on random programs") {
  OracleRegistry reg;
  // Runs its argument as a program with a fixed allowance.
  reg.add("RUN", [](const std::string& arg, OracleCall& call) {
    try {
      EvalOutcome r = call.evaluate(ProgramIndex(arg), "b", 40);
      return r.halted() ? r.output : std::string("!");
    } catch (const SyntaxError&) {
      return std::string("?");
    }
  });
  Interpreter vm(reg);
  testing_support::ProgramGen gen(2024);
  const std::vector<std::string> inputs = all_strings(kSigma, 2);
  for (int i = 0; i < 400; ++i) {
    std::string text = gen.term(3);
    if (i % 4 == 0) text = "(CONCAT (ORACLE RUN (CONST " + encode_literal(text) + ")) INPUT)";
    ProgramIndex p(text);
    const std::string& x = inputs[gen.pick(inputs.size())];
    EvalOutcome full = vm.eval(p, x, kBig);
    CHECK(same(full, vm.eval(p, x, kBig)));
    CHECK(full.steps_used <= kBig);
    if (!full.halted()) continue;
    // The least halting budget can exceed steps_used: an oracle must be
    // able to cover its full allowance even when it spends less.
    std::uint64_t least = 1;
    while (!vm.eval(p, x, least).halted()) ++least;
    CHECK(full.steps_used <= least);
    for (std::uint64_t b = 1; b < least; ++b) {
      CHECK(vm.eval(p, x, b).status == EvalStatus::kDiverged);
    }
    for (std::uint64_t b : {least, least + 1, 2 * least, least + 1000}) {
      EvalOutcome r = vm.eval(p, x, b);
      CHECK(r.halted());
      CHECK(r.output == full.output);
      CHECK(r.steps_used == full.steps_used);
    }
  }
}

TEST_CASE("s-m-n: pair-consuming example") {
  Interpreter vm;
  ProgramIndex q = smn_specialize(ProgramIndex("(CONCAT FIRST SECOND)"), "ab");
  for (const auto& x : all_strings(kSigma, 3)) {
    EvalOutcome r = vm.eval(q, x, kBig);
    CHECK(r.output == "ab" + x);
  }
}

TEST_CASE("s-m-n law on random programs and constants") {
  Interpreter vm;
  testing_support::ProgramGen gen(77);
  const auto inputs = all_strings(kSigma, 3);
  for (int i = 0; i < 60; ++i) {
    ProgramIndex p(gen.term(3));
    const std::string c = gen.literal(5);
    ProgramIndex q = smn_specialize(p, c);
    for (const auto& x : inputs) {
      CHECK(same(vm.eval(q, x, kBig), vm.eval(p, pair(c, x), kBig)));
    }
  }
}

TEST_CASE("double specialization associates") {
  Interpreter vm;
  // a·b·x from the input pair(a, pair(b, x))
  ProgramIndex p(
      "(CONCAT FIRST (CONCAT (EVAL (CONST FIRST) SECOND) "
      "(EVAL (CONST SECOND) SECOND)))");
  const auto small = all_strings(kSigma, 2);
  for (const auto& a : small) {
    for (const auto& b : small) {
      ProgramIndex twice = smn_specialize(smn_specialize(p, a), b);
      for (const auto& x : small) {
        EvalOutcome direct = vm.eval(p, pair(a, pair(b, x)), kBig);
        CHECK(direct.output == a + b + x);
        CHECK(same(vm.eval(twice, x, kBig), direct));
        CHECK(same(vm.eval(smn_specialize(p, a), pair(b, x), kBig), direct));
      }
    }
  }
}

TEST_CASE("self-application law") {
  OracleRegistry reg;
  reg.add("DOUBLER", text_oracle([](const std::string&) {
            return std::string("(CONCAT INPUT INPUT)");
          }));
  Interpreter vm(reg);
  const std::vector<std::string> fixtures = {
      "(CONST (CONST YDyn))",                        // halts with a constant program
      "(IF (EQ INPUT INPUT) (CONST INPUT) (CONST ))",  // halts with identity
      "(ORACLE DOUBLER INPUT)",                      // oracle-calling
      "(EVAL INPUT INPUT)",                          // diverges on itself
      "(CONST YDyn)",                                // halts with a non-program
  };
  for (const auto& text : fixtures) {
    CAPTURE(text);
    ProgramIndex n(text);
    ProgramIndex q = self_application_operator(n);
    CHECK(q == self_application_operator(n));
    for (const auto& x : all_strings(kSigma, 3)) {
      CHECK(same(vm.eval(q, x, 100'000), two_stage(vm, n, x, 100'000)));
    }
  }
  ProgramIndex q_const = self_application_operator(ProgramIndex("(CONST (CONST YDyn))"));
  CHECK(vm.eval(q_const, "ab#", 1000).output == "YDyn");
  ProgramIndex q_div = self_application_operator(ProgramIndex("(EVAL INPUT INPUT)"));
  CHECK(vm.eval(q_div, "a", 100'000).status == EvalStatus::kDiverged);
}

TEST_CASE("recursion theorem for several total index maps") {
  struct G {
    const char* name;
    std::function<std::string(const std::string&)> map;
  };
  const std::vector<G> maps = {
      {"CONSTANT", [](const std::string&) { return std::string("(CONST )"); }},
      {"IDENTITY", [](const std::string& e) { return e; }},
      {"QUINE",
       [](const std::string& e) {
         return "(IF (EQ INPUT (CONST a)) (CONST " + encode_literal(e) +
                ") (CONST b))";
       }},
      {"LENGTH",
       [](const std::string& e) {
         return "(CONCAT (CONST " + std::to_string(e.size()) + ") INPUT)";
       }},
      {"GUARD",
       [](const std::string& e) {
         return "(IF (MATCH_PAD a) (CONST YDyn) (CONST " +
                std::to_string(e.size() % 7) + "))";
       }},
  };
  OracleRegistry reg;
  for (const auto& g : maps) reg.add(g.name, text_oracle(g.map));
  Interpreter vm(reg);
  for (const auto& g : maps) {
    CAPTURE(g.name);
    ProgramIndex e_star = kleene_fixed_point(g.name, reg);
    ProgramIndex g_of_e(g.map(e_star.text()));
    for (const auto& x : all_strings(kSigma, 4)) {
      CHECK(same(vm.eval(e_star, x, 100'000), vm.eval(g_of_e, x, 100'000)));
    }
  }
  ProgramIndex quine = kleene_fixed_point("QUINE", reg);
  CHECK(vm.eval(quine, "a", 1000).output == quine.text());
  CHECK(vm.eval(kleene_fixed_point("CONSTANT", reg), "ab", 1000).output == "");
  CHECK_THROWS_AS(kleene_fixed_point("MISSING", reg), ConfigError);
}

TEST_CASE("oracle allowance is charged to the caller") {
  OracleRegistry reg;
  reg.add("RUN100", [](const std::string& arg, OracleCall& call) {
    EvalOutcome r = call.evaluate(ProgramIndex(arg), "", 100);
    return r.halted() ? r.output : std::string("diverged");
  });
  Interpreter vm(reg);
  ProgramIndex p("(ORACLE RUN100 (CONST (CONST z)))");
  // ORACLE + CONST visits, then the callee's single step
  CHECK(vm.eval(p, "", 1000).steps_used == 3);
  // not enough left to cover the allowance: the caller diverges
  CHECK(vm.eval(p, "", 50).status == EvalStatus::kDiverged);
  CHECK(vm.eval(p, "", 102).halted());
  CHECK(vm.eval(p, "", 101).status == EvalStatus::kDiverged);
  ProgramIndex loop("(ORACLE RUN100 (CONST (EVAL INPUT INPUT)))");
  EvalOutcome r = vm.eval(loop, "", 1000);
  CHECK(r.output == "diverged");
  CHECK(r.steps_used == 102);
}
