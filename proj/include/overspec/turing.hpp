#pragma once

// Deterministic single-tape Turing machines for the halting-reduction gadget.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace overspec {

enum class Move { kLeft, kRight, kStay };

struct Transition {
  std::string state;
  char read = '_';
  char write = '_';
  Move move = Move::kStay;
  std::string next;

  bool operator==(const Transition&) const = default;
};

struct TmRun {
  bool halted = false;
  // Transitions executed (<= the step limit).
  std::uint64_t steps = 0;
};

// Transitions must be defined for every (non-halting state, tape symbol)
// pair; halting states have none. The constructor rejects anything else.
class TuringMachine {
 public:
  TuringMachine(std::vector<std::string> states, std::vector<char> alphabet,
                char blank, std::vector<Transition> transitions,
                std::string start, std::vector<std::string> halting);

  // Runs on `input` for at most `max_steps` transitions. Input symbols outside
  // the tape alphabet make the machine reject immediately (halted = false,
  // steps = 0).
  TmRun run(std::string_view input, std::uint64_t max_steps) const;

  bool accepts_input(std::string_view input) const;

  // Single-token encoding used inside program text:
  //   Q=s1,s2;A=x,y;B=_;S=s1;H=s2;T=s1/x/y/R/s2,...
  std::string compact() const;
  static TuringMachine from_compact(std::string_view token);

  nlohmann::json to_json() const;
  static TuringMachine from_json(const nlohmann::json& doc);

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<char>& alphabet() const { return alphabet_; }
  char blank() const { return blank_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::string& start() const { return start_; }
  const std::vector<std::string>& halting() const { return halting_; }

 private:
  struct Action {
    int write = 0;
    int move = 0;
    int next = 0;
  };

  int state_index(const std::string& name) const;
  int symbol_index(char c) const;

  std::vector<std::string> states_;
  std::vector<char> alphabet_;
  char blank_;
  std::vector<Transition> transitions_;
  std::string start_;
  std::vector<std::string> halting_;

  // Dense table: actions_[state * |alphabet| + symbol].
  std::vector<Action> actions_;
  std::vector<bool> is_halting_;
  int start_index_ = 0;
  int blank_index_ = 0;
};

TuringMachine load_turing_machine(const std::string& path);

}  // namespace overspec
