#include "overspec/kleene.hpp"

#include "overspec/errors.hpp"

namespace overspec {

ProgramIndex kleene_seed_program(std::string_view g_oracle_name) {
  std::string text = "(ORACLE ";
  text += g_oracle_name;
  text += " (SELFAPPLY INPUT))";
  return ProgramIndex(text);
}

ProgramIndex kleene_fixed_point(std::string_view g_oracle_name,
                                const OracleRegistry& registry) {
  if (!registry.contains(g_oracle_name)) {
    throw ConfigError("no oracle named '" + std::string(g_oracle_name) +
                      "' is registered");
  }
  return self_application_operator(kleene_seed_program(g_oracle_name));
}

OracleFn text_oracle(std::function<std::string(const std::string&)> g) {
  return [g = std::move(g)](const std::string& arg, OracleCall&) {
    return g(arg);
  };
}

}  // namespace overspec
