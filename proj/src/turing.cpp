#include "overspec/turing.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "overspec/errors.hpp"

namespace overspec {
namespace {

constexpr std::string_view kReserved = ",;=/()\\ \t\r\n";

bool valid_state_name(const std::string& name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](char c) {
           return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
         });
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = text.find(sep, begin);
    parts.emplace_back(text.substr(begin, end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

char move_char(Move m) {
  switch (m) {
    case Move::kLeft:
      return 'L';
    case Move::kRight:
      return 'R';
    case Move::kStay:
      return 'S';
  }
  return 'S';
}

Move parse_move(std::string_view text) {
  if (text == "L") return Move::kLeft;
  if (text == "R") return Move::kRight;
  if (text == "S") return Move::kStay;
  throw InputError("malformed TM: move must be L, R or S, got '" +
                   std::string(text) + "'");
}

char one_char(const std::string& text, const char* what) {
  if (text.size() != 1) {
    throw InputError(std::string("malformed TM: ") + what +
                     " must be a single character, got '" + text + "'");
  }
  return text[0];
}

}  // namespace

TuringMachine::TuringMachine(std::vector<std::string> states,
                             std::vector<char> alphabet, char blank,
                             std::vector<Transition> transitions,
                             std::string start,
                             std::vector<std::string> halting)
    : states_(std::move(states)),
      alphabet_(std::move(alphabet)),
      blank_(blank),
      transitions_(std::move(transitions)),
      start_(std::move(start)),
      halting_(std::move(halting)) {
  if (states_.empty()) throw InputError("malformed TM: no states");
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!valid_state_name(states_[i])) {
      throw InputError("malformed TM: invalid state name '" + states_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (states_[i] == states_[j]) {
        throw InputError("malformed TM: duplicate state '" + states_[i] + "'");
      }
    }
  }
  if (alphabet_.empty()) throw InputError("malformed TM: empty tape alphabet");
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (kReserved.find(alphabet_[i]) != std::string_view::npos) {
      throw InputError(std::string("malformed TM: reserved tape symbol '") +
                       alphabet_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (alphabet_[i] == alphabet_[j]) {
        throw InputError(std::string("malformed TM: duplicate symbol '") +
                         alphabet_[i] + "'");
      }
    }
  }
  blank_index_ = symbol_index(blank_);
  if (blank_index_ < 0) {
    throw InputError("malformed TM: blank is not a tape symbol");
  }
  start_index_ = state_index(start_);
  if (start_index_ < 0) {
    throw InputError("malformed TM: unknown start state '" + start_ + "'");
  }

  const std::size_t k = alphabet_.size();
  is_halting_.assign(states_.size(), false);
  for (const auto& h : halting_) {
    int idx = state_index(h);
    if (idx < 0) {
      throw InputError("malformed TM: unknown halting state '" + h + "'");
    }
    is_halting_[static_cast<std::size_t>(idx)] = true;
  }

  std::vector<bool> defined(states_.size() * k, false);
  actions_.assign(states_.size() * k, Action{});
  for (const auto& t : transitions_) {
    int from = state_index(t.state);
    int to = state_index(t.next);
    int read = symbol_index(t.read);
    int write = symbol_index(t.write);
    if (from < 0 || to < 0) {
      throw InputError("malformed TM: transition names an unknown state");
    }
    if (read < 0 || write < 0) {
      throw InputError("malformed TM: transition names an unknown symbol");
    }
    if (is_halting_[static_cast<std::size_t>(from)]) {
      throw InputError("malformed TM: transition out of halting state '" +
                       t.state + "'");
    }
    std::size_t cell = static_cast<std::size_t>(from) * k +
                       static_cast<std::size_t>(read);
    if (defined[cell]) {
      throw InputError("malformed TM: duplicate transition on (" + t.state +
                       ", " + std::string(1, t.read) + ")");
    }
    defined[cell] = true;
    int move = t.move == Move::kLeft ? -1 : (t.move == Move::kRight ? 1 : 0);
    actions_[cell] = Action{write, move, to};
  }
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (is_halting_[s]) continue;
    for (std::size_t c = 0; c < k; ++c) {
      if (!defined[s * k + c]) {
        throw InputError("malformed TM: no transition on (" + states_[s] +
                         ", " + std::string(1, alphabet_[c]) + ")");
      }
    }
  }
}

int TuringMachine::state_index(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  return it == states_.end() ? -1 : static_cast<int>(it - states_.begin());
}

int TuringMachine::symbol_index(char c) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), c);
  return it == alphabet_.end() ? -1 : static_cast<int>(it - alphabet_.begin());
}

bool TuringMachine::accepts_input(std::string_view input) const {
  return std::all_of(input.begin(), input.end(),
                     [this](char c) { return symbol_index(c) >= 0; });
}

TmRun TuringMachine::run(std::string_view input,
                         std::uint64_t max_steps) const {
  if (!accepts_input(input)) return TmRun{false, 0};
  // Tape grows on demand in both directions; `head` indexes into `tape`.
  std::vector<int> tape;
  tape.reserve(input.size() + 16);
  for (char c : input) tape.push_back(symbol_index(c));
  if (tape.empty()) tape.push_back(blank_index_);
  std::size_t head = 0;
  const std::size_t k = alphabet_.size();
  int state = start_index_;
  std::uint64_t steps = 0;
  while (!is_halting_[static_cast<std::size_t>(state)]) {
    if (steps == max_steps) return TmRun{false, steps};
    const Action& a = actions_[static_cast<std::size_t>(state) * k +
                               static_cast<std::size_t>(tape[head])];
    tape[head] = a.write;
    if (a.move < 0) {
      if (head == 0) {
        tape.insert(tape.begin(), blank_index_);
      } else {
        --head;
      }
    } else if (a.move > 0) {
      ++head;
      if (head == tape.size()) tape.push_back(blank_index_);
    }
    state = a.next;
    ++steps;
  }
  return TmRun{true, steps};
}

std::string TuringMachine::compact() const {
  std::string out = "Q=";
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (i) out += ',';
    out += states_[i];
  }
  out += ";A=";
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (i) out += ',';
    out += alphabet_[i];
  }
  out += ";B=";
  out += blank_;
  out += ";S=" + start_ + ";H=";
  for (std::size_t i = 0; i < halting_.size(); ++i) {
    if (i) out += ',';
    out += halting_[i];
  }
  out += ";T=";
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (i) out += ',';
    out += t.state + '/' + t.read + '/' + t.write + '/' + move_char(t.move) +
           '/' + t.next;
  }
  return out;
}

TuringMachine TuringMachine::from_compact(std::string_view token) {
  std::vector<std::string> states, halting;
  std::vector<char> alphabet;
  std::vector<Transition> transitions;
  std::string start;
  std::string blank;
  bool seen[6] = {};
  for (const auto& field : split(token, ';')) {
    if (field.size() < 2 || field[1] != '=') {
      throw InputError("malformed TM token field '" + field + "'");
    }
    const std::string body = field.substr(2);
    const std::string keys = "QABSHT";
    auto slot = keys.find(field[0]);
    if (slot == std::string::npos || seen[slot]) {
      throw InputError("malformed TM token field '" + field + "'");
    }
    seen[slot] = true;
    switch (field[0]) {
      case 'Q':
        states = split(body, ',');
        break;
      case 'A':
        for (const auto& s : split(body, ',')) {
          alphabet.push_back(one_char(s, "tape symbol"));
        }
        break;
      case 'B':
        blank = body;
        break;
      case 'S':
        start = body;
        break;
      case 'H':
        halting = split(body, ',');
        break;
      case 'T':
        for (const auto& t : split(body, ',')) {
          auto parts = split(t, '/');
          if (parts.size() != 5) {
            throw InputError("malformed TM transition '" + t + "'");
          }
          transitions.push_back(Transition{parts[0],
                                           one_char(parts[1], "read symbol"),
                                           one_char(parts[2], "write symbol"),
                                           parse_move(parts[3]), parts[4]});
        }
        break;
    }
  }
  for (bool s : seen) {
    if (!s) throw InputError("malformed TM token: missing field");
  }
  return TuringMachine(std::move(states), std::move(alphabet),
                       one_char(blank, "blank"), std::move(transitions),
                       std::move(start), std::move(halting));
}

nlohmann::json TuringMachine::to_json() const {
  nlohmann::json alphabet = nlohmann::json::array();
  for (char c : alphabet_) alphabet.push_back(std::string(1, c));
  nlohmann::json transitions = nlohmann::json::array();
  for (const auto& t : transitions_) {
    transitions.push_back({{"state", t.state},
                           {"read", std::string(1, t.read)},
                           {"write", std::string(1, t.write)},
                           {"move", std::string(1, move_char(t.move))},
                           {"next", t.next}});
  }
  return {{"states", states_},
          {"alphabet", alphabet},
          {"blank", std::string(1, blank_)},
          {"transitions", transitions},
          {"start", start_},
          {"accept", halting_}};
}

TuringMachine TuringMachine::from_json(const nlohmann::json& doc) {
  try {
    std::vector<char> alphabet;
    for (const auto& s : doc.at("alphabet")) {
      alphabet.push_back(one_char(s.get<std::string>(), "tape symbol"));
    }
    std::vector<Transition> transitions;
    for (const auto& t : doc.at("transitions")) {
      transitions.push_back(Transition{
          t.at("state").get<std::string>(),
          one_char(t.at("read").get<std::string>(), "read symbol"),
          one_char(t.at("write").get<std::string>(), "write symbol"),
          parse_move(t.at("move").get<std::string>()),
          t.at("next").get<std::string>()});
    }
    return TuringMachine(
        doc.at("states").get<std::vector<std::string>>(), std::move(alphabet),
        one_char(doc.at("blank").get<std::string>(), "blank"),
        std::move(transitions), doc.at("start").get<std::string>(),
        doc.at("accept").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed TM descriptor: ") + e.what());
  }
}

TuringMachine load_turing_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open TM file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return TuringMachine::from_json(nlohmann::json::parse(buffer.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("TM file is not valid JSON: ") + e.what());
  }
}

}  // namespace overspec
