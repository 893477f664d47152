// Command-line front end: one subcommand per experiment. Payloads go to
// stdout (or DIR/report.{json,csv} with --out DIR); the run manifest goes to
// stderr (or DIR/manifest.json).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "overspec/aggregation.hpp"
#include "overspec/detector.hpp"
#include "overspec/errors.hpp"
#include "overspec/repair.hpp"
#include "overspec/scenario.hpp"

#ifndef OVERSPEC_VERSION
#define OVERSPEC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace overspec;

namespace {

constexpr const char* kScenarioEnv = "OVERSPEC_SCENARIO";

struct Payload {
  json report;
  std::optional<std::string> csv;
  json params = json::object();
  std::optional<std::uint64_t> seed;
  // Non-zero when the report itself describes invalid input.
  int exit_code = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && space(s[i])) ++i;
  return s.substr(i);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json profile_file(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw InputError("'" + path + "' is not valid JSON");
  return doc;
}

struct Globals {
  std::string scenario_path;
  std::string out_dir;
  bool csv = false;
  unsigned jobs = 1;
};

class Runner {
 public:
  explicit Runner(const Globals& g) : g_(g) {}

  const ScenarioConfig& scenario() {
    if (!cfg_) {
      std::string path = g_.scenario_path;
      if (path.empty()) {
        if (const char* env = std::getenv(kScenarioEnv)) path = env;
      }
      cfg_ = path.empty() ? default_scenario() : load_scenario(path);
      scenario_source_ = path.empty() ? "builtin:default" : path;
    }
    return *cfg_;
  }

  json scenario_manifest() {
    const ScenarioConfig& cfg = scenario();
    return {{"source", scenario_source_},
            {"hash", "fnv1a64:" + hex64(fnv1a64(serialize_scenario(cfg)))}};
  }

  bool uses_scenario() const { return cfg_.has_value(); }

 private:
  const Globals& g_;
  std::optional<ScenarioConfig> cfg_;
  std::string scenario_source_;
};

ProgramIndex load_program(const std::string& file, const std::string& expr) {
  if (!file.empty() && !expr.empty()) {
    throw InputError("give either --program or --expr, not both");
  }
  if (file.empty() && expr.empty()) {
    throw InputError("a program is required (--program FILE or --expr TEXT)");
  }
  return ProgramIndex(trim(file.empty() ? expr : read_file(file)));
}

std::vector<ProgramIndex> load_program_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InputError("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProgramIndex> programs;
  for (const auto& f : files) {
    try {
      programs.emplace_back(trim(read_file(f.string())));
    } catch (const SyntaxError& e) {
      throw InputError(f.string() + ": " + e.what());
    }
  }
  return programs;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overspecification detection and repair laboratory"};
  app.set_version_flag("--version", OVERSPEC_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--scenario", g.scenario_path,
                 std::string("Scenario JSON (default: $") + kScenarioEnv +
                     " or the built-in scenario)");
  app.add_option("--out", g.out_dir,
                 "Write report.json, report.csv and manifest.json to DIR");
  app.add_flag("--csv", g.csv, "Print the CSV payload instead of JSON");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  Runner runner(g);
  std::function<Payload()> job;
  std::string command;

  // validate-scenario
  std::size_t check_bound = 8;
  auto* validate = app.add_subcommand("validate-scenario",
                                      "Check scenario and witness-kit invariants");
  validate->add_option("--check-bound", check_bound, "Max length / pad depth");
  validate->callback([&] {
    command = "validate-scenario";
    job = [&] {
      Payload p;
      const ValidationReport r = validate_scenario(runner.scenario(), check_bound);
      p.report = to_json(r);
      p.params["check_bound"] = check_bound;
      if (!r.ok()) p.exit_code = 1;
      return p;
    };
  });

  // detect
  std::string program_file, program_expr;
  std::size_t max_len = 3;
  std::uint64_t budget = 10000;
  auto* detect = app.add_subcommand("detect", "Bounded overspecification detection");
  detect->add_option("--program", program_file, "Program file");
  detect->add_option("--expr", program_expr, "Inline program text");
  detect->add_option("--max-len", max_len, "Instance length cap n");
  detect->add_option("--budget", budget, "Step budget per evaluation")
      ->check(CLI::PositiveNumber);
  detect->callback([&] {
    command = "detect";
    job = [&] {
      const ProgramIndex f = load_program(program_file, program_expr);
      const ScenarioConfig& cfg = runner.scenario();
      DetectOptions options;
      options.jobs = g.jobs;
      options.keep_rows = true;
      DetectionReport r = decide_overspecification(
          f, max_len, cfg, budget, Interpreter({}, cfg.alphabet.pad()), options);
      Payload p;
      p.report = to_json(r);
      p.report["program"] = f.text();
      p.csv = scan_rows_csv(r);
      p.params = {{"program", f.text()}, {"max_len", max_len}, {"budget", budget},
                  {"jobs", g.jobs}};
      return p;
    };
  });

  // semidecide
  std::uint64_t stages = 1000;
  bool naive = false;
  auto* semi = app.add_subcommand("semidecide", "Dovetailing semi-decision");
  semi->add_option("--program", program_file, "Program file");
  semi->add_option("--expr", program_expr, "Inline program text");
  semi->add_option("--stages", stages, "Stage limit T");
  semi->add_flag("--naive", naive, "Re-run every instance at every stage");
  semi->callback([&] {
    command = "semidecide";
    job = [&] {
      const ProgramIndex f = load_program(program_file, program_expr);
      const ScenarioConfig& cfg = runner.scenario();
      SemiDecisionOutcome r = semidecide_overspecified(
          f, cfg, stages, Interpreter({}, cfg.alphabet.pad()),
          naive ? SemiMode::kNaive : SemiMode::kMemoized);
      Payload p;
      p.report = to_json(r);
      p.report["program"] = f.text();
      p.params = {{"program", f.text()}, {"stages", stages}, {"naive", naive}};
      return p;
    };
  });

  // halting-gadget
  std::string tm_file, tm_input;
  std::optional<std::size_t> gadget_pad_cap;
  auto* gadget = app.add_subcommand("halting-gadget",
                                    "Build the halting-reduction program f_{M,w}");
  gadget->add_option("--tm", tm_file, "Turing machine JSON")->required();
  gadget->add_option("--input", tm_input, "Machine input w");
  gadget->add_option("--pad-cap", gadget_pad_cap,
                     "Also run detection over pad depths 0..N");
  gadget->add_option("--budget", budget, "Step budget per evaluation")
      ->check(CLI::PositiveNumber);
  gadget->callback([&] {
    command = "halting-gadget";
    job = [&] {
      const ScenarioConfig& cfg = runner.scenario();
      TuringMachine tm = load_turing_machine(tm_file);
      ProgramIndex f = build_halting_gadget(tm, tm_input, cfg);
      Payload p;
      p.report = {{"program", f.text()},
                  {"total_fragment", is_total_fragment(f.ast())}};
      p.params = {{"tm", tm.to_json()}, {"input", tm_input}};
      if (gadget_pad_cap) {
        const std::size_t n = cfg.witness_kit.x0.size() + *gadget_pad_cap;
        DetectOptions options;
        options.jobs = g.jobs;
        options.keep_rows = true;
        DetectionReport r = decide_overspecification(
            f, n, cfg, budget, Interpreter({}, cfg.alphabet.pad()), options);
        p.report["detection"] = to_json(r);
        p.csv = scan_rows_csv(r);
        p.params["pad_cap"] = *gadget_pad_cap;
        p.params["budget"] = budget;
      }
      return p;
    };
  });

  // fixed-point
  std::string phi_name = "detector-backed";
  std::uint64_t fp_budget = 100000;
  auto* fixed = app.add_subcommand("fixed-point",
                                   "Construct e* for a repair operator");
  fixed->add_option("--phi", phi_name, "identity | literal-rewriter | "
                                       "constant-epsilon | detector-backed");
  fixed->add_option("--max-len", max_len, "Detection length cap n");
  fixed->add_option("--budget", fp_budget, "Step budget per evaluation")
      ->check(CLI::PositiveNumber);
  fixed->callback([&] {
    command = "fixed-point";
    job = [&] {
      const ScenarioConfig& cfg = runner.scenario();
      RepairOperator phi = find_repair_operator(cfg, phi_name);
      Payload p;
      p.report = to_json(
          construct_overspecified_fixed_point(phi, cfg, max_len, fp_budget));
      p.params = {{"phi", phi_name}, {"max_len", max_len}, {"budget", fp_budget}};
      return p;
    };
  });

  // audit-phi
  std::string programs_dir;
  bool with_fixed_point = false;
  auto* audit = app.add_subcommand(
      "audit-phi", "Conservativeness and uniform-elimination audit");
  audit->add_option("--phi", phi_name, "Repair operator name");
  audit->add_option("--programs", programs_dir, "Directory of program files")
      ->required();
  audit->add_option("--max-len", max_len, "Detection length cap n");
  audit->add_option("--budget", fp_budget, "Step budget per evaluation")
      ->check(CLI::PositiveNumber);
  audit->add_flag("--with-fixed-point", with_fixed_point,
                  "Append the operator's own e* to the program list");
  audit->callback([&] {
    command = "audit-phi";
    job = [&] {
      const ScenarioConfig& cfg = runner.scenario();
      RepairOperator phi = find_repair_operator(cfg, phi_name);
      std::vector<ProgramIndex> programs = load_program_dir(programs_dir);
      if (with_fixed_point) {
        programs.push_back(
            construct_overspecified_fixed_point(phi, cfg, max_len, fp_budget, 0)
                .e_star);
      }
      Payload p;
      p.report = {
          {"conservativeness",
           to_json(check_conservative_on_domain(phi, programs, max_len, cfg,
                                                fp_budget))},
          {"uniform_elimination",
           to_json(check_uniform_elimination_on_domain(phi, programs, max_len,
                                                       cfg, fp_budget))}};
      std::vector<std::string> texts;
      for (const auto& e : programs) texts.push_back(e.text());
      p.params = {{"phi", phi_name}, {"programs", texts}, {"max_len", max_len},
                  {"budget", fp_budget}, {"with_fixed_point", with_fixed_point}};
      return p;
    };
  });

  // btl-experiment
  std::string population_file;
  int dv = 1;
  std::uint64_t samples = 100000, seed = 7, runs = 1;
  auto* btl = app.add_subcommand("btl-experiment",
                                 "Sample pairwise outcomes and fit BTL scores");
  btl->add_option("--population", population_file, "Population JSON")->required();
  btl->add_option("--dv", dv, "Structural score difference");
  btl->add_option("--samples", samples, "Comparisons per run")
      ->check(CLI::PositiveNumber);
  btl->add_option("--seed", seed, "Experiment seed");
  btl->add_option("--runs", runs, "Independent runs")->check(CLI::PositiveNumber);
  btl->callback([&] {
    command = "btl-experiment";
    job = [&] {
      EvaluatorPopulation pop = load_population(population_file);
      BtlExperiment exp = btl_experiment(pop, dv, samples, runs, seed);
      Payload p;
      p.report = to_json(exp);
      p.csv = btl_runs_csv(exp);
      p.seed = seed;
      p.params = {{"population", to_json(pop)}, {"dv", dv}, {"samples", samples},
                  {"runs", runs}};
      return p;
    };
  });

  // asymmetry
  int delta = 1;
  auto* asym = app.add_subcommand("asymmetry",
                                  "Regret-weighted population score gaps");
  asym->add_option("--population", population_file, "Population JSON")->required();
  asym->add_option("--delta", delta, "Structural score offset");
  asym->callback([&] {
    command = "asymmetry";
    job = [&] {
      EvaluatorPopulation pop = load_population(population_file);
      Payload p;
      p.report = to_json(population_scores_asymmetric(delta, pop));
      p.params = {{"population", to_json(pop)}, {"delta", delta}};
      return p;
    };
  });

  // majority
  std::string profile_path;
  auto* maj = app.add_subcommand("majority", "Pairwise majority tournament");
  maj->add_option("--profile", profile_path, "Profile JSON")->required();
  maj->callback([&] {
    command = "majority";
    job = [&] {
      BenchmarkProfile profile = profile_from_json(profile_file(profile_path));
      Payload p;
      p.report = to_json(majority_pairwise(profile));
      p.params = {{"profile", to_json(profile)}};
      return p;
    };
  });

  // demo
  auto* demo = app.add_subcommand(
      "demo", "Fixed-point walkthrough with the detector-backed operator");
  demo->add_option("--max-len", max_len, "Detection length cap n");
  demo->add_option("--budget", fp_budget, "Step budget per evaluation")
      ->check(CLI::PositiveNumber);
  demo->callback([&] {
    command = "demo";
    job = [&] {
      const ScenarioConfig& cfg = runner.scenario();
      RepairOperator phi = detector_backed_repair(cfg);
      FixedPointReport fp =
          construct_overspecified_fixed_point(phi, cfg, max_len, fp_budget);
      Payload p;
      p.report = {{"e_star", fp.e_star.text()},
                  {"phi", phi.name},
                  {"phi_of_e_star_equals_e_star", fp.phi_of_e_star_equals_e_star},
                  {"verdict", fp.detection.verdict},
                  {"witness", fp.detection.witness
                                  ? json(*fp.detection.witness)
                                  : json(nullptr)},
                  {"report", to_json(fp)}};
      p.params = {{"phi", phi.name}, {"max_len", max_len}, {"budget", fp_budget}};
      return p;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0 && e.get_name() != "CallForHelp" &&
        e.get_name() != "CallForAllHelp" && e.get_name() != "CallForVersion") {
      std::cerr << app.help();
      return 1;
    }
    return code == 0 ? 0 : 1;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    Payload p = job();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    json manifest{{"command", command},
                  {"params", p.params},
                  {"seed", p.seed ? json(*p.seed) : json(nullptr)},
                  {"scenario", runner.uses_scenario() ? runner.scenario_manifest()
                                                      : json(nullptr)},
                  {"version", OVERSPEC_VERSION},
                  {"wall_clock_seconds", seconds}};
    const std::string report = p.report.dump(2) + "\n";
    if (!g.out_dir.empty()) {
      fs::create_directories(g.out_dir);
      write_file(fs::path(g.out_dir) / "report.json", report);
      if (p.csv) write_file(fs::path(g.out_dir) / "report.csv", *p.csv);
      write_file(fs::path(g.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    } else {
      std::cout << (g.csv && p.csv ? *p.csv : report);
      std::cerr << manifest.dump() << "\n";
    }
    return p.exit_code;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 1;
  } catch (const UndefinedError& e) {
    std::cerr << "undefined: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
