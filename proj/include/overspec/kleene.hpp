#pragma once

// Kleene fixed points over the pipeline language.
//
// For a host oracle G mapping program text to program text, the program
//   p  = (ORACLE G (SELFAPPLY INPUT))
// computes n -> G(q(n)), and e* = q(p) satisfies
//   eval(e*, x) ≃ eval(eval(p, p), x) = eval(G(q(p)), x) = eval(G(e*), x).

#include <string>
#include <string_view>

#include "overspec/program.hpp"
#include "overspec/vm.hpp"

namespace overspec {

// Text of (ORACLE g (SELFAPPLY INPUT)) after sugar expansion.
ProgramIndex kleene_seed_program(std::string_view g_oracle_name);

// e* = q(kleene_seed_program(g)). Throws ConfigError if `registry` has no
// oracle named `g_oracle_name`.
ProgramIndex kleene_fixed_point(std::string_view g_oracle_name,
                                const OracleRegistry& registry);

// Wraps a pure text-to-text map as an oracle that performs no evaluation.
OracleFn text_oracle(std::function<std::string(const std::string&)> g);

}  // namespace overspec
