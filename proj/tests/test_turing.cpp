#include "doctest.h"
#include "overspec/errors.hpp"
#include "overspec/turing.hpp"
#include "support.hpp"

using namespace overspec;
using testing_support::data_path;

namespace {

TuringMachine fixture(const char* name) {
  return load_turing_machine(data_path(std::string("tm/") + name + ".json"));
}

}  // namespace

TEST_CASE("fixture machines halt at their known times") {
  struct Case {
    const char* name;
    const char* input;
    std::uint64_t t;
  };
  for (const Case& c : {Case{"halt1", "", 1}, Case{"halt4", "111", 4},
                        Case{"halt9", "111", 9}, Case{"halt4", "", 1},
                        Case{"halt4", "11111111", 9}}) {
    CAPTURE(c.name);
    TuringMachine tm = fixture(c.name);
    TmRun r = tm.run(c.input, 1000);
    CHECK(r.halted);
    CHECK(r.steps == c.t);
    // exactly t steps are needed
    CHECK(tm.run(c.input, c.t).halted);
    CHECK_FALSE(tm.run(c.input, c.t - 1).halted);
  }
}

TEST_CASE("non-halting fixtures run to the step limit") {
  for (const char* name : {"runaway", "pingpong"}) {
    TuringMachine tm = fixture(name);
    for (std::uint64_t limit : {0, 1, 7, 1000, 100000}) {
      TmRun r = tm.run("1", limit);
      CHECK_FALSE(r.halted);
      CHECK(r.steps == limit);
    }
  }
}

TEST_CASE("input outside the tape alphabet is rejected without running") {
  TmRun r = fixture("halt4").run("1x1", 100);
  CHECK_FALSE(r.halted);
  CHECK(r.steps == 0);
  CHECK_FALSE(fixture("halt4").accepts_input("1x"));
}

TEST_CASE("compact token and JSON round trips") {
  for (const char* name : {"halt1", "halt4", "halt9", "runaway", "pingpong"}) {
    TuringMachine tm = fixture(name);
    TuringMachine back = TuringMachine::from_compact(tm.compact());
    CHECK(back.compact() == tm.compact());
    CHECK(back.transitions() == tm.transitions());
    CHECK(TuringMachine::from_json(tm.to_json()).compact() == tm.compact());
  }
}

TEST_CASE("malformed machines are input errors") {
  // missing transition for (q0, '_')
  CHECK_THROWS_AS(TuringMachine({"q0", "h"}, {'1', '_'}, '_',
                                {{"q0", '1', '1', Move::kRight, "h"}}, "q0",
                                {"h"}),
                  InputError);
  // transition out of a halting state
  CHECK_THROWS_AS(TuringMachine({"h"}, {'_'}, '_',
                                {{"h", '_', '_', Move::kRight, "h"}}, "h", {"h"}),
                  InputError);
  // blank not in alphabet
  CHECK_THROWS_AS(TuringMachine({"h"}, {'1'}, '_', {}, "h", {"h"}), InputError);
  CHECK_THROWS_AS(TuringMachine::from_compact("Q=a;A=_"), InputError);
  CHECK_THROWS_AS(TuringMachine::from_json(nlohmann::json::parse("{}")), InputError);
}
