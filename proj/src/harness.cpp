// Copyright 2026 The pbrl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pbrl/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pbrl/error.hpp"

namespace pbrl {

namespace {

namespace fs = std::filesystem;

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

std::vector<double> dirichlet_row(int n, Rng& rng) {
  std::vector<double> row(n);
  double sum = 0.0;
  for (double& v : row) {
    v = -std::log(1.0 - uniform01(rng));
    sum += v;
  }
  for (double& v : row) v /= sum;
  return row;
}

std::vector<double> random_kernel(int S, int A, Rng& rng) {
  std::vector<double> p;
  for (int i = 0; i < S * A; ++i) {
    auto row = dirichlet_row(S, rng);
    p.insert(p.end(), row.begin(), row.end());
  }
  return p;
}

EpisodicMDP random_mdp(const GeneratorSpec& spec, Rng& rng) {
  const int S = spec.S, A = spec.A, H = spec.H;
  if (spec.transition == "tabular") {
    return EpisodicMDP::tabular(S, A, H, 0, random_kernel(S, A, rng));
  }
  require(spec.transition == "linear_mixture",
          "generator.transition must be tabular or linear_mixture");
  require(spec.d_P >= 1, "generator.d_P must be positive");
  const int d = spec.d_P;
  // psi_i(s, a, s') = P_i(s' | s, a) / sqrt(d), theta = sqrt(d) w, w on the simplex.
  std::vector<double> psi(static_cast<std::size_t>(S) * A * S * d);
  for (int i = 0; i < d; ++i) {
    auto base = random_kernel(S, A, rng);
    for (int sa = 0; sa < S * A; ++sa) {
      for (int s2 = 0; s2 < S; ++s2) {
        psi[(static_cast<std::size_t>(sa) * S + s2) * d + i] =
            base[static_cast<std::size_t>(sa) * S + s2] / std::sqrt(double(d));
      }
    }
  }
  auto w = dirichlet_row(d, rng);
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) theta[i] = std::sqrt(double(d)) * w[i];
  return EpisodicMDP::linear_mixture(
      S, A, H, 0,
      {MixtureFeatures(S, A, d, std::move(psi)), theta, std::sqrt(double(d))});
}

std::vector<double> random_reward(int S, int A, int H, Rng& rng) {
  std::vector<double> r(static_cast<std::size_t>(S) * A);
  for (double& v : r) v = uniform01(rng) / H;
  return r;
}

Eigen::VectorXd random_direction(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// Step-sum features with every ||x(tau)|| <= 1/2, i.e. L = 1.
TrajectoryFeatureMap signed_step_features(int S, int A, int H, int d, Rng& rng) {
  std::vector<double> phi(static_cast<std::size_t>(S) * A * d);
  for (double& v : phi) v = 2.0 * uniform01(rng) - 1.0;
  double worst = 0.0;
  for (int sa = 0; sa < S * A; ++sa) {
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) n2 += phi[sa * d + i] * phi[sa * d + i];
    worst = std::max(worst, std::sqrt(n2));
  }
  const double scale = 1.0 / (2.0 * H * std::max(worst, 1e-12));
  for (double& v : phi) v *= scale;
  return TrajectoryFeatureMap::step_sum(S, A, d, std::move(phi), 1.0);
}

// Nonnegative step-sum features with every ||x(tau)|| <= 1, i.e. L = 2.
TrajectoryFeatureMap positive_step_features(int S, int A, int H, int d, Rng& rng) {
  std::vector<double> phi(static_cast<std::size_t>(S) * A * d);
  for (double& v : phi) v = uniform01(rng);
  double worst = 0.0;
  for (int sa = 0; sa < S * A; ++sa) {
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) n2 += phi[sa * d + i] * phi[sa * d + i];
    worst = std::max(worst, std::sqrt(n2));
  }
  const double scale = 1.0 / (H * std::max(worst, 1e-12));
  for (double& v : phi) v *= scale;
  return TrajectoryFeatureMap::step_sum(S, A, d, std::move(phi), 2.0);
}

PolicyPool make_pool(const GeneratorSpec& spec, int S, int A, int H) {
  return enumerate_policy_pool(S, A, H, spec.pool_mode, spec.pool_cap, spec.seed);
}

Environment random_environment(const GeneratorSpec& spec, Rng& rng) {
  EpisodicMDP mdp = random_mdp(spec, rng);
  const int S = spec.S, A = spec.A, H = spec.H;
  std::optional<PreferenceModel> pref;
  std::optional<FeedbackModel> fb;
  if (spec.setting == "pairwise") {
    if (spec.pref == "utility") {
      pref = PreferenceModel::utility(S, A, H, random_reward(S, A, H, rng));
    } else if (spec.pref == "linear") {
      auto f = signed_step_features(S, A, H, spec.d_T, rng);
      pref = PreferenceModel::linear(std::move(f), 0.5 * random_direction(spec.d_T, rng), 0.5);
    } else if (spec.pref == "logistic") {
      auto f = signed_step_features(S, A, H, spec.d_T, rng);
      pref = PreferenceModel::logistic(
          std::move(f), spec.logistic_scale * random_direction(spec.d_T, rng),
          spec.logistic_scale);
    } else {
      throw InvalidArgument("generator.pref must be utility, linear or logistic");
    }
  } else {
    require(spec.setting == "once_per_episode",
            "generator.setting must be pairwise or once_per_episode");
    if (spec.feedback == "utility_sum") {
      fb = FeedbackModel::utility_sum(S, A, H, random_reward(S, A, H, rng));
    } else if (spec.feedback == "linear_clipped") {
      auto f = positive_step_features(S, A, H, spec.d_G, rng);
      Eigen::VectorXd theta(spec.d_G);
      for (int i = 0; i < spec.d_G; ++i) theta[i] = uniform01(rng);
      theta /= std::max(theta.norm(), 1e-12);
      fb = FeedbackModel::linear_clipped(std::move(f), theta, 1.0);
    } else {
      throw InvalidArgument("generator.feedback must be utility_sum or linear_clipped");
    }
  }
  return make_environment(std::move(mdp), std::move(pref), std::move(fb),
                          make_pool(spec, S, A, H));
}

// Single-step problem: one state that loops onto itself, one best arm.
Environment reference_environment(const GeneratorSpec& spec, Rng& rng) {
  const int A = spec.A;
  require(A >= 2, "reference family needs at least 2 arms");
  const int best = static_cast<int>(rng() % static_cast<std::uint64_t>(A));
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  EpisodicMDP mdp = EpisodicMDP::linear_mixture(
      1, A, 1, 0, {MixtureFeatures(1, A, 1, std::vector<double>(A, 1.0)), one, 1.0});
  PolicyPool pool = enumerate_policy_pool(1, A, 1, PoolMode::kExhaustive);
  if (spec.setting == "pairwise") {
    // Other arms sit below the best one. With spread > 0 most comparisons
    // are noisy and the gap to the runner-up varies with the seed.
    std::vector<double> phi(A);
    for (int a = 0; a < A; ++a) {
      phi[a] = a == best ? 0.5 : -0.5 + spec.spread * uniform01(rng);
    }
    auto f = TrajectoryFeatureMap::step_sum(1, A, 1, std::move(phi), 1.0);
    return make_environment(std::move(mdp),
                            PreferenceModel::linear(std::move(f), 0.5 * one, 0.5),
                            std::nullopt, std::move(pool));
  }
  // Feedback: one nonnegative feature, the best arm has the largest value.
  std::vector<double> phi(A);
  for (int a = 0; a < A; ++a) phi[a] = a == best ? 1.0 : 0.1 + 0.6 * uniform01(rng);
  auto f = TrajectoryFeatureMap::step_sum(1, A, 1, std::move(phi), 2.0);
  return make_environment(std::move(mdp), std::nullopt,
                          FeedbackModel::linear_clipped(std::move(f), one, 1.0),
                          std::move(pool));
}

// States: 0 start, 1 rewarding, 2 absorbing dead end. Action 0 in the start
// state leads to the dead end, so the all-zeros policy is the worst one.
Environment trap_environment() {
  const int S = 3, A = 2, H = 2;
  std::vector<double> p(S * A * S, 0.0);
  auto set = [&](int s, int a, int s2) { p[(s * A + a) * S + s2] = 1.0; };
  set(0, 0, 2);
  set(0, 1, 1);
  set(1, 0, 1);
  set(1, 1, 1);
  set(2, 0, 2);
  set(2, 1, 2);
  std::vector<double> r(S * A, 0.0);
  r[0 * A + 1] = 0.5;
  r[1 * A + 0] = 0.25;
  r[1 * A + 1] = 0.5;
  return make_environment(EpisodicMDP::tabular(S, A, H, 0, std::move(p)),
                          PreferenceModel::utility(S, A, H, std::move(r)),
                          std::nullopt,
                          enumerate_policy_pool(S, A, H, PoolMode::kExhaustive));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator

nlohmann::json GeneratorSpec::to_json() const {
  return {{"family", family},
          {"S", S},
          {"A", A},
          {"H", H},
          {"transition", transition},
          {"d_P", d_P},
          {"setting", setting},
          {"pref", pref},
          {"d_T", d_T},
          {"logistic_scale", logistic_scale},
          {"feedback", feedback},
          {"d_G", d_G},
          {"spread", spread},
          {"pool", {{"mode", pool_mode == PoolMode::kExhaustive ? "exhaustive" : "sampled"},
                    {"cap", pool_cap}}},
          {"seed", seed},
          {"require_condorcet", require_condorcet},
          {"vary_with_seed", vary_with_seed}};
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec g;
  g.family = j.value("family", g.family);
  g.S = j.value("S", g.S);
  g.A = j.value("A", g.A);
  g.H = j.value("H", g.H);
  g.transition = j.value("transition", g.transition);
  g.d_P = j.value("d_P", g.d_P);
  g.setting = j.value("setting", g.setting);
  g.pref = j.value("pref", g.pref);
  g.d_T = j.value("d_T", g.d_T);
  g.logistic_scale = j.value("logistic_scale", g.logistic_scale);
  g.feedback = j.value("feedback", g.feedback);
  g.d_G = j.value("d_G", g.d_G);
  g.spread = j.value("spread", g.spread);
  if (j.contains("pool")) {
    const std::string mode = j["pool"].value("mode", std::string("exhaustive"));
    require(mode == "exhaustive" || mode == "sampled",
            "generator.pool.mode must be exhaustive or sampled");
    g.pool_mode = mode == "exhaustive" ? PoolMode::kExhaustive : PoolMode::kSampled;
    g.pool_cap = j["pool"].value("cap", g.pool_cap);
  }
  g.seed = j.value("seed", g.seed);
  g.require_condorcet = j.value("require_condorcet", g.require_condorcet);
  g.vary_with_seed = j.value("vary_with_seed", g.vary_with_seed);
  require(g.S >= 1 && g.A >= 1 && g.H >= 1, "generator sizes must be positive");
  require(g.spread >= 0.0 && g.spread < 1.0, "generator.spread must lie in [0, 1)");
  return g;
}

Environment generate_environment(const GeneratorSpec& spec, Rng& rng) {
  if (spec.family == "trap") return trap_environment();
  if (spec.family == "reference") return reference_environment(spec, rng);
  require(spec.family == "random",
          "generator.family must be random, reference or trap");
  for (int rejections = 0;; ++rejections) {
    try {
      Environment env = random_environment(spec, rng);
      env.rejections = rejections;
      return env;
    } catch (const NoCondorcetWinner&) {
      if (!spec.require_condorcet) throw;
      if (rejections + 1 >= 100) {
        throw GenerationFailed("no Condorcet policy after 100 draws");
      }
    }
  }
}

Environment generate_environment(const GeneratorSpec& spec) {
  Rng rng(spec.seed);
  return generate_environment(spec, rng);
}

Environment resolve_environment(const nlohmann::json& descriptor,
                                std::uint64_t run_seed) {
  if (descriptor.contains("generator")) {
    GeneratorSpec spec = GeneratorSpec::from_json(descriptor["generator"]);
    if (spec.vary_with_seed) spec.seed += run_seed;
    return generate_environment(spec);
  }
  return environment_from_json(descriptor);
}

// ---------------------------------------------------------------------------
// Config

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json agents_json = nlohmann::json::array();
  for (const auto& a : agents) agents_json.push_back(a.to_json());
  return {{"environment", environment},
          {"agents", agents_json},
          {"K", episodes},
          {"seeds", seeds},
          {"out", out},
          {"emit", {{"records", emit_records}}}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  require(j.contains("environment"), "config needs an environment section");
  c.environment = j["environment"];
  c.episodes = j.value("K", 1);
  require(c.episodes >= 1, "K must be at least 1");
  std::vector<nlohmann::json> agent_json;
  if (j.contains("agents")) {
    for (const auto& a : j["agents"]) agent_json.push_back(a);
  } else if (j.contains("agent")) {
    agent_json.push_back(j["agent"]);
  } else {
    agent_json.push_back(nlohmann::json::object());
  }
  const nlohmann::json emit = j.value("emit", nlohmann::json::object());
  for (auto a : agent_json) {
    a["K"] = c.episodes;
    if (!a.contains("emit")) {
      a["emit"] = {{"estimator_state", emit.value("estimator_state", false)},
                   {"timing", emit.value("timing", false)}};
    }
    c.agents.push_back(AgentConfig::from_json(a));
  }
  if (j.contains("seeds")) {
    if (j["seeds"].is_number_integer()) {
      const int count = j["seeds"].get<int>();
      require(count >= 1, "seeds must be at least 1");
      c.seeds.clear();
      for (int i = 0; i < count; ++i) c.seeds.push_back(i);
    } else {
      c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    }
  } else if (j.contains("seed")) {
    c.seeds = {j["seed"].get<std::uint64_t>()};
  }
  require(!c.seeds.empty(), "config needs at least one seed");
  c.out = j.value("out", c.out);
  c.emit_records = emit.value("records", true);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Summary

double growth_exponent(const std::vector<double>& curve) {
  const std::size_t K = curve.size();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = (K + 1) / 2; k <= K; ++k) {
    if (k == 0) continue;
    const double r = curve[k - 1];
    if (r > 0.0) pts.emplace_back(std::log(double(k)), std::log(r));
  }
  if (pts.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

RunSummary summarize(const std::vector<EpisodeRecord>& records) {
  RunSummary s;
  double total = 0.0, outer = 0.0, bt = 0.0, bp = 0.0;
  std::vector<double> bt_curve, bp_curve;
  int member = 0, cov_both = 0, cov_pref = 0, cov_trans = 0, cov_n = 0;
  for (const auto& r : records) {
    total += r.regret;
    s.cumulative_regret.push_back(total);
    if (r.outer_regret) {
      outer += *r.outer_regret;
      s.cumulative_outer_regret.push_back(outer);
    }
    bt += r.preference_bonus;
    bp += r.transition_bonus;
    bt_curve.push_back(bt);
    bp_curve.push_back(bp);
    member += r.optimal_in_set ? 1 : 0;
    if (r.covered_preference && r.covered_transition) {
      ++cov_n;
      cov_pref += *r.covered_preference;
      cov_trans += *r.covered_transition;
      cov_both += *r.covered_preference && *r.covered_transition;
    }
  }
  const double n = std::max<std::size_t>(records.size(), 1);
  s.final_regret = total;
  s.exponent_p = growth_exponent(s.cumulative_regret);
  s.pistar_rate = member / n;
  if (cov_n > 0) {
    s.coverage_rate = double(cov_both) / cov_n;
    s.preference_coverage_rate = double(cov_pref) / cov_n;
    s.transition_coverage_rate = double(cov_trans) / cov_n;
  }
  s.preference_bonus_total = bt;
  s.transition_bonus_total = bp;
  s.preference_bonus_exponent = growth_exponent(bt_curve);
  s.transition_bonus_exponent = growth_exponent(bp_curve);
  return s;
}

nlohmann::json RunSummary::to_json() const {
  nlohmann::json j = {{"final_regret", final_regret},
                      {"exponent_p", exponent_p},
                      {"pistar_rate", pistar_rate},
                      {"coverage_rate", coverage_rate},
                      {"preference_coverage_rate", preference_coverage_rate},
                      {"transition_coverage_rate", transition_coverage_rate},
                      {"preference_bonus_total", preference_bonus_total},
                      {"transition_bonus_total", transition_bonus_total},
                      {"preference_bonus_exponent", preference_bonus_exponent},
                      {"transition_bonus_exponent", transition_bonus_exponent},
                      {"cumulative_regret", cumulative_regret}};
  if (!cumulative_outer_regret.empty()) {
    j["cumulative_outer_regret"] = cumulative_outer_regret;
    j["final_outer_regret"] = cumulative_outer_regret.back();
  }
  return j;
}

// ---------------------------------------------------------------------------
// Runs

RunLog run_agent(const Environment& env, const nlohmann::json& env_descriptor,
                 const AgentConfig& agent, int episodes, std::uint64_t seed) {
  AgentConfig cfg = agent;
  cfg.episodes = episodes;
  Agent a(env, cfg);
  Rng rng(seed);
  RunLog log;
  log.records.reserve(episodes);
  for (int k = 0; k < episodes; ++k) log.records.push_back(a.run_episode(rng));
  log.summary = summarize(log.records);

  nlohmann::json betas = nlohmann::json::object();
  if (env.pairwise() || cfg.algorithm == Algorithm::kReduction) {
    betas["preference"] = a.beta(Stream::kPreference);
  } else {
    betas["feedback"] = a.beta(Stream::kFeedback);
  }
  betas["transition"] = a.beta(Stream::kTransition);
  log.manifest = {
      {"version", kVersion},
      {"environment", env_descriptor},
      {"agent", cfg.to_json()},
      {"K", episodes},
      {"seed", seed},
      {"betas", betas},
      {"pool",
       {{"mode", env.pool.mode == PoolMode::kExhaustive ? "exhaustive" : "sampled"},
        {"size", env.pool.size()},
        {"seed", env.pool.seed}}},
      {"policy_class", "finite pool of deterministic Markov policies"},
      {"optimal_index", env.optimal_index},
      {"rejections", env.rejections}};
  return log;
}

RunLog run_cell(const ExperimentConfig& config, std::size_t agent_index,
                std::uint64_t seed) {
  Environment env = resolve_environment(config.environment, seed);
  return run_agent(env, config.environment, config.agents.at(agent_index),
                   config.episodes, seed);
}

std::string records_jsonl(const std::vector<EpisodeRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::string cell_directory(const AgentConfig& agent, std::uint64_t seed) {
  std::string name(algorithm_name(agent.algorithm));
  if (agent.algorithm == Algorithm::kPbopPlus) name += "_n" + std::to_string(agent.n);
  return name + "_seed" + std::to_string(seed);
}

void write_run(const RunLog& log, const std::string& dir, bool emit_records) {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "manifest.json", log.manifest.dump(2) + "\n");
  if (emit_records) write_file(fs::path(dir) / "records.jsonl", records_jsonl(log.records));
  write_file(fs::path(dir) / "summary.json", log.summary.to_json().dump(2) + "\n");
}

int thread_budget() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("PBRL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

std::vector<CellResult> sweep(const ExperimentConfig& config,
                              const std::string& out) {
  struct Cell {
    std::size_t agent;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    for (std::uint64_t s : config.seeds) cells.push_back({a, s});
  }
  // Agents sharing an algorithm name get an index prefix.
  std::vector<std::string> prefix(config.agents.size());
  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    for (std::size_t b = 0; b < config.agents.size(); ++b) {
      if (a != b && cell_directory(config.agents[a], 0) == cell_directory(config.agents[b], 0)) {
        prefix[a] = "agent" + std::to_string(a) + "_";
      }
    }
  }
  std::vector<CellResult> results(cells.size());
  const int n = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_budget())
  for (int i = 0; i < n; ++i) {
    const AgentConfig& agent = config.agents[cells[i].agent];
    CellResult& res = results[i];
    res.algo = cell_directory(agent, 0);
    res.algo.resize(res.algo.size() - std::string("_seed0").size());
    res.seed = cells[i].seed;
    res.episodes = config.episodes;
    res.n = agent.n;
    res.c_beta = agent.c_beta;
    const std::string dir =
        (fs::path(out) / (prefix[cells[i].agent] + cell_directory(agent, res.seed))).string();
    try {
      RunLog log = run_cell(config, cells[i].agent, res.seed);
      write_run(log, dir, config.emit_records);
      res.summary = log.summary;
      res.ok = true;
    } catch (const std::exception& e) {
      res.error = e.what();
      try {
        fs::create_directories(dir);
        nlohmann::json err = {{"error", res.error},
                              {"agent", agent.to_json()},
                              {"seed", res.seed},
                              {"environment", config.environment}};
        write_file(fs::path(dir) / "error.json", err.dump(2) + "\n");
      } catch (const std::exception&) {
      }
    }
  }
  fs::create_directories(out);
  std::ostringstream csv;
  csv << "algo,seed,K,n,c_beta,final_regret,exponent_p,pistar_rate,coverage_rate\n";
  for (const auto& r : results) {
    csv << r.algo << ',' << r.seed << ',' << r.episodes << ',' << r.n << ','
        << r.c_beta << ',';
    if (r.ok) {
      csv << r.summary.final_regret << ',' << r.summary.exponent_p << ','
          << r.summary.pistar_rate << ',' << r.summary.coverage_rate << '\n';
    } else {
      csv << "nan,nan,nan,nan\n";
    }
  }
  write_file(fs::path(out) / "summary.csv", csv.str());
  return results;
}

bool replay_matches(const std::string& manifest_path, std::string* detail) {
  const nlohmann::json m = nlohmann::json::parse(read_file(manifest_path));
  const AgentConfig agent = AgentConfig::from_json(m.at("agent"));
  const auto seed = m.at("seed").get<std::uint64_t>();
  const int episodes = m.at("K").get<int>();
  Environment env = resolve_environment(m.at("environment"), seed);
  RunLog log = run_agent(env, m.at("environment"), agent, episodes, seed);
  const fs::path dir = fs::path(manifest_path).parent_path();
  auto mismatch = [&](const std::string& what) {
    if (detail) *detail = what;
    return false;
  };
  if (log.manifest.dump(2) + "\n" != read_file(manifest_path)) {
    return mismatch("manifest differs");
  }
  if (fs::exists(dir / "records.jsonl") &&
      records_jsonl(log.records) != read_file((dir / "records.jsonl").string())) {
    return mismatch("records.jsonl differs");
  }
  if (log.summary.to_json().dump(2) + "\n" !=
      read_file((dir / "summary.json").string())) {
    return mismatch("summary.json differs");
  }
  if (detail) *detail = "identical";
  return true;
}

}  // namespace pbrl
