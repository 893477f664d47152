#pragma once

// Benchmark profiles, pairwise majority, random-utility evaluators, BTL
// fitting, and the piecewise-linear regret model.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "overspec/scenario.hpp"

namespace overspec {

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t splitmix64(std::uint64_t& state);

// Seed for sub-stream `stream` of an experiment seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform in [0, n); n >= 1. Rejection sampling keeps it unbiased.
  std::uint64_t index(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

double logistic(double t);

// ---------------------------------------------------------------------------
// Profiles and majority

struct BenchmarkProfile {
  std::string instance;
  std::vector<std::string> candidates;
  // rankings[i] lists candidates best first.
  std::vector<std::vector<std::string>> rankings;
};

// Throws InputError unless there is at least one ranking, at least two
// distinct candidates, and every ranking is a permutation of them.
void validate_profile(const BenchmarkProfile& profile);

struct Tournament {
  std::vector<std::string> candidates;
  // votes[a][b] = evaluators ranking candidates[a] above candidates[b].
  std::vector<std::vector<std::size_t>> votes;
  std::size_t evaluators = 0;

  // Strictly more than k/2 evaluators prefer a to b.
  bool beats(std::size_t a, std::size_t b) const;
  bool beats(const std::string& a, const std::string& b) const;
  bool has_cycle() const;
};

Tournament majority_pairwise(const BenchmarkProfile& profile);

BenchmarkProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const BenchmarkProfile& profile);
nlohmann::json to_json(const Tournament& t);

enum class NonMemberMode { kRandom, kAdversarial };

struct InheritanceReport {
  std::size_t evaluators = 0;
  std::size_t coalition = 0;
  std::uint64_t trials = 0;
  int delta_v = 0;
  // Δv = 0: nothing is asserted.
  bool vacuous = false;
  std::uint64_t violations = 0;
  std::optional<BenchmarkProfile> first_violation;
};

// Draws `trials` profiles over `candidates` (|candidates| >= 3) where the
// first `coalition` of k evaluators rank y above y' and the rest rank
// randomly (or put y' first when adversarial), and counts profiles whose
// majority fails to place y above y'. Requires v(x,y) >= v(x,y').
InheritanceReport check_deterministic_inheritance(
    const ScenarioConfig& cfg, std::string_view x,
    const std::vector<std::string>& candidates, const std::string& y,
    const std::string& y_prime, std::size_t k, std::size_t coalition,
    std::uint64_t trials, std::uint64_t seed,
    NonMemberMode mode = NonMemberMode::kRandom);

nlohmann::json to_json(const InheritanceReport& report);

// ---------------------------------------------------------------------------
// Evaluator populations

struct Evaluator {
  double alpha = 1.0;
  double lambda = 1.0;
  // (instance, implementation) -> baseline quality; absent pairs are 0.
  std::map<std::pair<std::string, std::string>, double> quality;

  double baseline(const std::string& x, const std::string& y) const;
};

struct EvaluatorPopulation {
  std::vector<Evaluator> evaluators;
};

// Throws InputError on non-finite or negative alpha, or lambda < 1.
void validate_population(const EvaluatorPopulation& population);
EvaluatorPopulation population_from_json(const nlohmann::json& doc);
EvaluatorPopulation load_population(const std::string& path);
nlohmann::json to_json(const EvaluatorPopulation& population);

// Population with the given sensitivities (and lambdas, default 1).
EvaluatorPopulation make_population(const std::vector<double>& alphas,
                                    const std::vector<double>& lambdas = {});

// (1/k) Σ σ(α_i Δv). Throws InputError on an empty population.
double pairwise_win_probability(int delta_v,
                                const EvaluatorPopulation& population);

// A candidate implementation with its structural score v(x, y).
struct ScoredCandidate {
  std::string name;
  int v = 0;
};

std::vector<ScoredCandidate> score_candidates(
    const ScenarioConfig& cfg, std::string_view x,
    const std::vector<std::string>& candidates);

// wins[a][b] = draws in which candidates[a] beat candidates[b].
struct OutcomeCounts {
  std::vector<std::string> candidates;
  std::vector<std::vector<std::uint64_t>> wins;

  std::uint64_t total() const;
};

// m comparisons cycling over the unordered candidate pairs. Each picks an
// evaluator uniformly and lets the first of the pair win with probability
// σ(u_i(x,a) - u_i(x,b)), u_i = q_i + α_i·v.
OutcomeCounts sample_pairwise_outcomes(
    const std::string& x, const std::vector<ScoredCandidate>& candidates,
    const EvaluatorPopulation& population, std::uint64_t m, std::uint64_t seed);

nlohmann::json to_json(const OutcomeCounts& counts);

struct ScoreTable {
  std::vector<std::string> candidates;
  // Log-strengths, zero-sum.
  std::vector<double> scores;
  std::uint64_t iterations = 0;
  bool converged = false;
  double last_change = 0.0;

  double score(const std::string& name) const;
};

inline constexpr double kBtlTolerance = 1e-10;
inline constexpr std::uint64_t kBtlMaxIterations = 10000;

// Minorization-maximization for the Bradley-Terry likelihood. Throws
// FitError when the comparison graph is disconnected (naming the
// components) or when a candidate never wins or never loses (no finite
// maximizer).
ScoreTable fit_btl(const OutcomeCounts& counts,
                   double tolerance = kBtlTolerance,
                   std::uint64_t max_iters = kBtlMaxIterations);

nlohmann::json to_json(const ScoreTable& table);

struct BtlRun {
  std::uint64_t run = 0;
  std::uint64_t seed = 0;
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  double empirical_rate = 0;
  // score(y) - score(y')
  double fitted_delta = 0;
};

struct BtlExperiment {
  int delta_v = 0;
  std::uint64_t samples = 0;
  double analytic_win_probability = 0;
  std::vector<BtlRun> runs;
  std::uint64_t positive_runs = 0;
};

// `runs` independent experiments on the pair y (v = Δv) vs y' (v = 0) with
// m samples each; run r uses derive_seed(seed, r).
BtlExperiment btl_experiment(const EvaluatorPopulation& population, int delta_v,
                             std::uint64_t samples, std::uint64_t runs,
                             std::uint64_t seed);

nlohmann::json to_json(const BtlExperiment& experiment);
std::string btl_runs_csv(const BtlExperiment& experiment);

// ---------------------------------------------------------------------------
// Regret weighting

// w_i(δ) = α_i δ for δ >= 0, -λ_i α_i |δ| otherwise.
double regret_weight(const Evaluator& e, double delta);

// Σ λ_i α_i / Σ α_i. Throws UndefinedError when Σ α_i = 0.
double lambda_eff(const EvaluatorPopulation& population);

struct AsymmetryReport {
  int delta = 0;
  double r_plus = 0, r_zero = 0, r_minus = 0;
  // R(y+) - R(y0) and R(y0) - R(y-).
  double over_gap = 0, under_gap = 0;
  // under_gap / over_gap; absent when δ = 0.
  std::optional<double> ratio;
  std::optional<double> lambda_eff;
};

// Population scores R(x, y) = (1/k) Σ (q_i(x,y) + w_i(v)) for candidates with
// v = +δ, 0, -δ. Baselines come from each evaluator's quality for
// (x, names[i]) and must agree across the three candidates.
AsymmetryReport population_scores_asymmetric(
    int delta, const EvaluatorPopulation& population,
    const std::string& x = "",
    const std::array<std::string, 3>& names = {"y+", "y0", "y-"});

nlohmann::json to_json(const AsymmetryReport& report);

// ---------------------------------------------------------------------------
// Consistency sweep

struct SweepRow {
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  double fitted_delta = 0;
  double error = 0;
};

struct SweepPoint {
  std::uint64_t m = 0;
  double median_error = 0;
  double median_fitted_delta = 0;
  // Runs whose fitted difference has the sign of the true one (ties count
  // as correct only when the true difference is 0).
  std::uint64_t sign_correct = 0;
  std::uint64_t runs = 0;
};

struct SweepResult {
  double true_delta = 0;
  std::vector<SweepRow> rows;
  std::vector<SweepPoint> points;
};

// Two candidates with structural scores Δv and 0. The true score difference
// is α·Δv, which requires every evaluator to share one α (InputError
// otherwise). Run j of size m is seeded with derive_seed(seed, ...).
SweepResult consistency_sweep(const EvaluatorPopulation& population, int delta_v,
                              const std::vector<std::uint64_t>& sample_sizes,
                              std::uint64_t runs, std::uint64_t seed);

nlohmann::json to_json(const SweepResult& result);
std::string sweep_rows_csv(const SweepResult& result);

}  // namespace overspec
