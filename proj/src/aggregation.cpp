#include "overspec/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "overspec/errors.hpp"
#include "overspec/format.hpp"

namespace overspec {
namespace {

double r12(double v) { return round_significant(v, 12); }

std::size_t position_of(const std::vector<std::string>& v,
                        const std::string& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (stream * 0xd1342543de82ef95ULL + 1);
  return splitmix64(state);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  while (true) {
    std::uint64_t r = engine_();
    if (r < limit) return r % n;
  }
}

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

void validate_profile(const BenchmarkProfile& profile) {
  if (profile.rankings.empty()) throw InputError("profile has no rankings");
  std::set<std::string> unique(profile.candidates.begin(),
                               profile.candidates.end());
  if (unique.size() != profile.candidates.size()) {
    throw InputError("profile candidates are not distinct");
  }
  if (unique.size() < 2) throw InputError("profile needs at least 2 candidates");
  for (std::size_t i = 0; i < profile.rankings.size(); ++i) {
    const auto& r = profile.rankings[i];
    std::set<std::string> seen(r.begin(), r.end());
    if (r.size() != unique.size() || seen != unique) {
      throw InputError("ranking " + std::to_string(i) +
                       " is not a permutation of the candidates");
    }
  }
}

bool Tournament::beats(std::size_t a, std::size_t b) const {
  return 2 * votes[a][b] > evaluators;
}

bool Tournament::beats(const std::string& a, const std::string& b) const {
  std::size_t ia = position_of(candidates, a);
  std::size_t ib = position_of(candidates, b);
  if (ia == candidates.size() || ib == candidates.size()) {
    throw InputError("unknown candidate");
  }
  return beats(ia, ib);
}

bool Tournament::has_cycle() const {
  const std::size_t n = candidates.size();
  std::vector<int> color(n, 0);
  // Iterative DFS with an explicit edge cursor per node.
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next == n) {
        color[u] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t v = next++;
      if (!beats(u, v)) continue;
      if (color[v] == 1) return true;
      if (color[v] == 0) {
        color[v] = 1;
        stack.emplace_back(v, 0);
      }
    }
  }
  return false;
}

Tournament majority_pairwise(const BenchmarkProfile& profile) {
  validate_profile(profile);
  Tournament t;
  t.candidates = profile.candidates;
  t.evaluators = profile.rankings.size();
  const std::size_t n = t.candidates.size();
  t.votes.assign(n, std::vector<std::size_t>(n, 0));
  for (const auto& ranking : profile.rankings) {
    std::vector<std::size_t> pos(n);
    for (std::size_t r = 0; r < n; ++r) {
      pos[position_of(t.candidates, ranking[r])] = r;
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && pos[a] < pos[b]) ++t.votes[a][b];
      }
    }
  }
  return t;
}

BenchmarkProfile profile_from_json(const nlohmann::json& doc) {
  try {
    BenchmarkProfile p;
    p.instance = doc.value("instance", std::string());
    p.candidates = doc.at("candidates").get<std::vector<std::string>>();
    p.rankings =
        doc.at("rankings").get<std::vector<std::vector<std::string>>>();
    validate_profile(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed profile: ") + e.what());
  }
}

nlohmann::json to_json(const BenchmarkProfile& profile) {
  return {{"instance", profile.instance},
          {"candidates", profile.candidates},
          {"rankings", profile.rankings}};
}

nlohmann::json to_json(const Tournament& t) {
  nlohmann::json edges = nlohmann::json::array();
  const std::size_t n = t.candidates.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && t.beats(a, b)) {
        edges.push_back({{"winner", t.candidates[a]},
                         {"loser", t.candidates[b]},
                         {"votes", t.votes[a][b]}});
      }
    }
  }
  return {{"candidates", t.candidates},
          {"evaluators", t.evaluators},
          {"majority", std::move(edges)},
          {"cyclic", t.has_cycle()}};
}

InheritanceReport check_deterministic_inheritance(
    const ScenarioConfig& cfg, std::string_view x,
    const std::vector<std::string>& candidates, const std::string& y,
    const std::string& y_prime, std::size_t k, std::size_t coalition,
    std::uint64_t trials, std::uint64_t seed, NonMemberMode mode) {
  if (candidates.size() < 3) {
    throw InputError("inheritance checks need at least 3 candidates");
  }
  if (position_of(candidates, y) == candidates.size() ||
      position_of(candidates, y_prime) == candidates.size() || y == y_prime) {
    throw InputError("y and y' must be distinct candidates");
  }
  if (k == 0 || coalition > k) throw InputError("coalition must fit in k >= 1");
  InheritanceReport report;
  report.evaluators = k;
  report.coalition = coalition;
  report.delta_v =
      compatibility_score(x, y, cfg) - compatibility_score(x, y_prime, cfg);
  if (report.delta_v < 0) throw InputError("requires v(x,y) >= v(x,y')");
  if (report.delta_v == 0) {
    report.vacuous = true;
    return report;
  }
  Rng rng(seed);
  BenchmarkProfile profile;
  profile.instance = std::string(x);
  profile.candidates = candidates;
  profile.rankings.resize(k);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    for (std::size_t i = 0; i < k; ++i) {
      auto& r = profile.rankings[i];
      r = candidates;
      rng.shuffle(r);
      const bool member = i < coalition;
      if (!member && mode == NonMemberMode::kRandom) continue;
      auto py = std::find(r.begin(), r.end(), y);
      auto pyp = std::find(r.begin(), r.end(), y_prime);
      const bool want_y_first = member;
      if ((py < pyp) != want_y_first) std::iter_swap(py, pyp);
    }
    ++report.trials;
    if (!majority_pairwise(profile).beats(y, y_prime)) {
      ++report.violations;
      if (!report.first_violation) report.first_violation = profile;
    }
  }
  return report;
}

nlohmann::json to_json(const InheritanceReport& report) {
  nlohmann::json j{{"evaluators", report.evaluators},
                   {"coalition", report.coalition},
                   {"decisive", 2 * report.coalition > report.evaluators},
                   {"trials", report.trials},
                   {"delta_v", report.delta_v},
                   {"vacuous", report.vacuous},
                   {"violations", report.violations}};
  j["first_violation"] = report.first_violation
                             ? to_json(*report.first_violation)
                             : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

double Evaluator::baseline(const std::string& x, const std::string& y) const {
  auto it = quality.find({x, y});
  return it == quality.end() ? 0.0 : it->second;
}

void validate_population(const EvaluatorPopulation& population) {
  if (population.evaluators.empty()) throw InputError("population is empty");
  for (std::size_t i = 0; i < population.evaluators.size(); ++i) {
    const auto& e = population.evaluators[i];
    const std::string who = "evaluator " + std::to_string(i);
    if (!std::isfinite(e.alpha) || e.alpha < 0) {
      throw InputError(who + ": alpha must be finite and >= 0");
    }
    if (!std::isfinite(e.lambda) || e.lambda < 1) {
      throw InputError(who + ": lambda must be finite and >= 1");
    }
    for (const auto& [key, q] : e.quality) {
      if (!std::isfinite(q)) throw InputError(who + ": quality must be finite");
    }
  }
}

EvaluatorPopulation population_from_json(const nlohmann::json& doc) {
  try {
    EvaluatorPopulation pop;
    for (const auto& e : doc.at("evaluators")) {
      Evaluator ev;
      ev.alpha = e.at("alpha").get<double>();
      ev.lambda = e.value("lambda", 1.0);
      if (e.contains("quality")) {
        for (const auto& q : e.at("quality")) {
          ev.quality[{q.at("instance").get<std::string>(),
                      q.at("impl").get<std::string>()}] =
              q.at("value").get<double>();
        }
      }
      pop.evaluators.push_back(std::move(ev));
    }
    validate_population(pop);
    return pop;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed population: ") + e.what());
  }
}

EvaluatorPopulation load_population(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open population file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) {
    throw InputError("population file '" + path + "' is not valid JSON");
  }
  return population_from_json(doc);
}

nlohmann::json to_json(const EvaluatorPopulation& population) {
  nlohmann::json evaluators = nlohmann::json::array();
  for (const auto& e : population.evaluators) {
    nlohmann::json quality = nlohmann::json::array();
    for (const auto& [key, value] : e.quality) {
      quality.push_back(
          {{"instance", key.first}, {"impl", key.second}, {"value", r12(value)}});
    }
    evaluators.push_back({{"alpha", r12(e.alpha)},
                          {"lambda", r12(e.lambda)},
                          {"quality", std::move(quality)}});
  }
  return {{"evaluators", std::move(evaluators)}};
}

EvaluatorPopulation make_population(const std::vector<double>& alphas,
                                    const std::vector<double>& lambdas) {
  if (!lambdas.empty() && lambdas.size() != alphas.size()) {
    throw InputError("alphas and lambdas differ in length");
  }
  EvaluatorPopulation pop;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    Evaluator e;
    e.alpha = alphas[i];
    e.lambda = lambdas.empty() ? 1.0 : lambdas[i];
    pop.evaluators.push_back(std::move(e));
  }
  validate_population(pop);
  return pop;
}

double pairwise_win_probability(int delta_v,
                                const EvaluatorPopulation& population) {
  if (population.evaluators.empty()) throw InputError("population is empty");
  double sum = 0.0;
  for (const auto& e : population.evaluators) {
    sum += logistic(e.alpha * delta_v);
  }
  return sum / static_cast<double>(population.evaluators.size());
}

std::vector<ScoredCandidate> score_candidates(
    const ScenarioConfig& cfg, std::string_view x,
    const std::vector<std::string>& candidates) {
  std::vector<ScoredCandidate> out;
  for (const auto& y : candidates) {
    out.push_back({y, compatibility_score(x, y, cfg)});
  }
  return out;
}

std::uint64_t OutcomeCounts::total() const {
  std::uint64_t n = 0;
  for (const auto& row : wins) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

OutcomeCounts sample_pairwise_outcomes(
    const std::string& x, const std::vector<ScoredCandidate>& candidates,
    const EvaluatorPopulation& population, std::uint64_t m,
    std::uint64_t seed) {
  if (m == 0) throw InputError("sample count must be >= 1");
  if (candidates.size() < 2) throw InputError("need at least 2 candidates");
  validate_population(population);
  const std::size_t n = candidates.size();
  const std::size_t k = population.evaluators.size();

  // diff[i][pair] = u_i(x, a) - u_i(x, b)
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  }
  std::vector<std::vector<double>> p_first(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Evaluator& e = population.evaluators[i];
    for (const auto& [a, b] : pairs) {
      const double ua = e.baseline(x, candidates[a].name) + e.alpha * candidates[a].v;
      const double ub = e.baseline(x, candidates[b].name) + e.alpha * candidates[b].v;
      p_first[i].push_back(logistic(ua - ub));
    }
  }

  OutcomeCounts counts;
  for (const auto& c : candidates) counts.candidates.push_back(c.name);
  counts.wins.assign(n, std::vector<std::uint64_t>(n, 0));
  Rng rng(seed);
  for (std::uint64_t d = 0; d < m; ++d) {
    const std::size_t pi = d % pairs.size();
    const std::size_t i = rng.index(k);
    const auto [a, b] = pairs[pi];
    if (rng.uniform() < p_first[i][pi]) {
      ++counts.wins[a][b];
    } else {
      ++counts.wins[b][a];
    }
  }
  return counts;
}

nlohmann::json to_json(const OutcomeCounts& counts) {
  return {{"candidates", counts.candidates}, {"wins", counts.wins}};
}

double ScoreTable::score(const std::string& name) const {
  std::size_t i = position_of(candidates, name);
  if (i == candidates.size()) throw InputError("unknown candidate '" + name + "'");
  return scores[i];
}

ScoreTable fit_btl(const OutcomeCounts& counts, double tolerance,
                   std::uint64_t max_iters) {
  const std::size_t n = counts.candidates.size();
  if (n < 2 || counts.wins.size() != n) {
    throw InputError("outcome counts need at least 2 candidates");
  }
  std::vector<std::vector<double>> games(n, std::vector<double>(n, 0.0));
  std::vector<double> won(n, 0.0), lost(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      games[a][b] = static_cast<double>(counts.wins[a][b] + counts.wins[b][a]);
      won[a] += static_cast<double>(counts.wins[a][b]);
      lost[a] += static_cast<double>(counts.wins[b][a]);
    }
  }

  // Connected components of the comparison graph.
  std::vector<std::size_t> component(n, n);
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] != n) continue;
    std::vector<std::size_t> todo{s};
    component[s] = components;
    while (!todo.empty()) {
      std::size_t u = todo.back();
      todo.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (games[u][v] > 0 && component[v] == n) {
          component[v] = components;
          todo.push_back(v);
        }
      }
    }
    ++components;
  }
  if (components > 1) {
    std::string msg = "comparison graph is disconnected:";
    for (std::size_t c = 0; c < components; ++c) {
      msg += c ? " | {" : " {";
      bool first = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (component[i] != c) continue;
        msg += (first ? "" : ", ") + counts.candidates[i];
        first = false;
      }
      msg += "}";
    }
    throw FitError(msg);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (won[i] == 0 || lost[i] == 0) {
      throw FitError("candidate '" + counts.candidates[i] + "' " +
                     (won[i] == 0 ? "never wins" : "never loses") +
                     "; the likelihood has no finite maximizer");
    }
  }

  ScoreTable table;
  table.candidates = counts.candidates;
  std::vector<double> strength(n, 1.0), log_s(n, 0.0), next(n);
  for (table.iterations = 0; table.iterations < max_iters;) {
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && games[i][j] > 0) {
          denom += games[i][j] / (strength[i] + strength[j]);
        }
      }
      next[i] = std::log(won[i] / denom);
    }
    const double mean =
        std::accumulate(next.begin(), next.end(), 0.0) / static_cast<double>(n);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] -= mean;
      change = std::max(change, std::abs(next[i] - log_s[i]));
      log_s[i] = next[i];
      strength[i] = std::exp(log_s[i]);
    }
    ++table.iterations;
    table.last_change = change;
    if (change < tolerance) {
      table.converged = true;
      break;
    }
  }
  table.scores = log_s;
  return table;
}

nlohmann::json to_json(const ScoreTable& table) {
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t i = 0; i < table.candidates.size(); ++i) {
    scores[table.candidates[i]] = r12(table.scores[i]);
  }
  return {{"scores", std::move(scores)},
          {"iterations", table.iterations},
          {"converged", table.converged}};
}

BtlExperiment btl_experiment(const EvaluatorPopulation& population, int delta_v,
                             std::uint64_t samples, std::uint64_t runs,
                             std::uint64_t seed) {
  BtlExperiment exp;
  exp.delta_v = delta_v;
  exp.samples = samples;
  exp.analytic_win_probability = pairwise_win_probability(delta_v, population);
  const std::vector<ScoredCandidate> pair{{"y", delta_v}, {"y'", 0}};
  for (std::uint64_t r = 0; r < runs; ++r) {
    BtlRun run;
    run.run = r;
    run.seed = derive_seed(seed, r);
    OutcomeCounts counts =
        sample_pairwise_outcomes("", pair, population, samples, run.seed);
    run.wins = counts.wins[0][1];
    run.losses = counts.wins[1][0];
    run.empirical_rate =
        static_cast<double>(run.wins) / static_cast<double>(samples);
    ScoreTable fit = fit_btl(counts);
    run.fitted_delta = fit.scores[0] - fit.scores[1];
    if (run.fitted_delta > 0) ++exp.positive_runs;
    exp.runs.push_back(run);
  }
  return exp;
}

nlohmann::json to_json(const BtlExperiment& experiment) {
  std::vector<double> deltas;
  for (const auto& r : experiment.runs) deltas.push_back(r.fitted_delta);
  return {{"delta_v", experiment.delta_v},
          {"samples", experiment.samples},
          {"runs", experiment.runs.size()},
          {"analytic_win_probability", r12(experiment.analytic_win_probability)},
          {"positive_runs", experiment.positive_runs},
          {"median_fitted_delta", r12(median(deltas))}};
}

std::string btl_runs_csv(const BtlExperiment& experiment) {
  std::ostringstream out;
  out.precision(12);
  out << "m,seed,wins,losses,empirical_rate,fitted_delta\n";
  for (const auto& r : experiment.runs) {
    out << experiment.samples << ',' << r.seed << ',' << r.wins << ','
        << r.losses << ',' << r12(r.empirical_rate) << ','
        << r12(r.fitted_delta) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

double regret_weight(const Evaluator& e, double delta) {
  return delta >= 0 ? e.alpha * delta : -e.lambda * e.alpha * std::abs(delta);
}

double lambda_eff(const EvaluatorPopulation& population) {
  double num = 0.0, den = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& e : population.evaluators) {
    num += e.lambda * e.alpha;
    den += e.alpha;
    if (e.alpha > 0.0) {
      lo = std::min(lo, e.lambda);
      hi = std::max(hi, e.lambda);
    }
  }
  if (den == 0.0) {
    throw UndefinedError("lambda_eff is undefined when every alpha is zero");
  }
  // A weighted mean; clamping only removes rounding past the extremes.
  return std::clamp(num / den, lo, hi);
}

AsymmetryReport population_scores_asymmetric(
    int delta, const EvaluatorPopulation& population, const std::string& x,
    const std::array<std::string, 3>& names) {
  validate_population(population);
  const double k = static_cast<double>(population.evaluators.size());
  const double v[3] = {static_cast<double>(delta), 0.0,
                       -static_cast<double>(delta)};
  double r[3] = {0.0, 0.0, 0.0};
  for (const auto& e : population.evaluators) {
    const double q = e.baseline(x, names[0]);
    if (e.baseline(x, names[1]) != q || e.baseline(x, names[2]) != q) {
      throw InputError("asymmetry requires equal baseline quality across " +
                       names[0] + ", " + names[1] + ", " + names[2]);
    }
    for (int c = 0; c < 3; ++c) r[c] += q + regret_weight(e, v[c]);
  }
  AsymmetryReport report;
  report.delta = delta;
  report.r_plus = r[0] / k;
  report.r_zero = r[1] / k;
  report.r_minus = r[2] / k;
  report.over_gap = report.r_plus - report.r_zero;
  report.under_gap = report.r_zero - report.r_minus;
  if (delta != 0 && report.over_gap != 0.0) {
    report.ratio = report.under_gap / report.over_gap;
  }
  try {
    report.lambda_eff = lambda_eff(population);
  } catch (const UndefinedError&) {
  }
  return report;
}

nlohmann::json to_json(const AsymmetryReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(r12(*v)) : nlohmann::json(nullptr);
  };
  return {{"delta", report.delta},
          {"r_plus", r12(report.r_plus)},
          {"r_zero", r12(report.r_zero)},
          {"r_minus", r12(report.r_minus)},
          {"over_gap", r12(report.over_gap)},
          {"under_gap", r12(report.under_gap)},
          {"ratio", opt(report.ratio)},
          {"lambda_eff", opt(report.lambda_eff)}};
}

// ---------------------------------------------------------------------------

SweepResult consistency_sweep(const EvaluatorPopulation& population, int delta_v,
                              const std::vector<std::uint64_t>& sample_sizes,
                              std::uint64_t runs, std::uint64_t seed) {
  validate_population(population);
  const double alpha = population.evaluators.front().alpha;
  for (const auto& e : population.evaluators) {
    if (e.alpha != alpha) {
      throw InputError("consistency sweep needs one shared alpha");
    }
  }
  SweepResult result;
  result.true_delta = alpha * delta_v;
  const std::vector<ScoredCandidate> pair{{"y", delta_v}, {"y'", 0}};
  for (std::size_t mi = 0; mi < sample_sizes.size(); ++mi) {
    const std::uint64_t m = sample_sizes[mi];
    SweepPoint point;
    point.m = m;
    std::vector<double> errors, deltas;
    for (std::uint64_t r = 0; r < runs; ++r) {
      SweepRow row;
      row.m = m;
      row.seed = derive_seed(derive_seed(seed, mi), r);
      ScoreTable fit = fit_btl(
          sample_pairwise_outcomes("", pair, population, m, row.seed));
      row.fitted_delta = fit.scores[0] - fit.scores[1];
      row.error = std::abs(row.fitted_delta - result.true_delta);
      const bool sign_ok =
          result.true_delta > 0   ? row.fitted_delta > 0
          : result.true_delta < 0 ? row.fitted_delta < 0
                                  : true;
      if (sign_ok) ++point.sign_correct;
      ++point.runs;
      errors.push_back(row.error);
      deltas.push_back(row.fitted_delta);
      result.rows.push_back(row);
    }
    point.median_error = median(errors);
    point.median_fitted_delta = median(deltas);
    result.points.push_back(point);
  }
  return result;
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"m", p.m},
                      {"runs", p.runs},
                      {"median_error", r12(p.median_error)},
                      {"median_fitted_delta", r12(p.median_fitted_delta)},
                      {"sign_correct", p.sign_correct}});
  }
  return {{"true_delta", r12(result.true_delta)}, {"points", std::move(points)}};
}

std::string sweep_rows_csv(const SweepResult& result) {
  std::ostringstream out;
  out.precision(12);
  out << "m,seed,fitted_delta,error\n";
  for (const auto& r : result.rows) {
    out << r.m << ',' << r.seed << ',' << r12(r.fitted_delta) << ','
        << r12(r.error) << '\n';
  }
  return out.str();
}

}  // namespace overspec
