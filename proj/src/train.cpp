// Copyright 2026 The ptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "ptrack/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ptrack {

const char* to_string(Algorithm algo) { return algo == Algorithm::kCem ? "cem" : "ppo"; }

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "cem") return Algorithm::kCem;
  if (name == "ppo") return Algorithm::kPpo;
  throw ConfigError("algo: must be \"cem\" or \"ppo\", got \"" + name + "\"");
}

void CemOptions::validate() const {
  if (population < 2) throw ConfigError("cem.population: must be >= 2");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) {
    throw ConfigError("cem.elite_fraction: must be in (0, 1]");
  }
  if (!(init_std > 0.0)) throw ConfigError("cem.init_std: must be > 0");
  if (!(min_std >= 0.0)) throw ConfigError("cem.min_std: must be >= 0");
  if (!(std_smoothing > 0.0 && std_smoothing <= 1.0)) {
    throw ConfigError("cem.std_smoothing: must be in (0, 1]");
  }
  if (paths_per_iteration < 1) throw ConfigError("cem.paths_per_iteration: must be >= 1");
}

void PpoOptions::validate() const {
  if (!(clip > 0.0)) throw ConfigError("ppo.clip: must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma: must be in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("ppo.lambda: must be in [0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("ppo.learning_rate: must be > 0");
  if (episodes_per_iteration < 1) throw ConfigError("ppo.episodes_per_iteration: must be >= 1");
  if (epochs < 1) throw ConfigError("ppo.epochs: must be >= 1");
  if (minibatch < 1) throw ConfigError("ppo.minibatch: must be >= 1");
}

std::vector<std::size_t> select_elites(const std::vector<double>& fitness,
                                       const std::vector<Eigen::VectorXd>& candidates,
                                       std::size_t count) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fitness[a] != fitness[b]) return fitness[a] > fitness[b];
    return std::lexicographical_compare(candidates[a].begin(), candidates[a].end(),
                                        candidates[b].begin(), candidates[b].end());
  });
  order.resize(std::min(count, order.size()));
  return order;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "iteration,mean_return,mean_duration,mean_deviation\n";
  out.precision(17);
  for (const CurvePoint& c : curve) {
    out << c.iteration << ',' << c.mean_return << ',' << c.mean_duration << ','
        << c.mean_deviation << '\n';
  }
}

PolicyParams initial_params(const EnvFactory& factory, const TrainOptions& options) {
  Rng rng(derive_seed(options.seed, 0));
  const double log_std = options.algorithm == Algorithm::kPpo ? options.ppo.init_log_std : -0.5;
  return PolicyParams::initial(factory.dimension(), factory.config, rng, options.hidden, log_std);
}

namespace {

void require_finite(double value, const std::string& what, int iteration) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "training diverged: " << what << " is " << value << " at iteration " << iteration;
    throw RuntimeFailure(msg.str());
  }
}

std::vector<std::size_t> sample_batch(std::size_t n, int count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  std::vector<std::size_t> batch;
  for (int i = 0; i < count; ++i) batch.push_back(idx[static_cast<std::size_t>(i) % n]);
  return batch;
}

CurvePoint curve_point(int iteration, const std::vector<EpisodeSummary>& episodes) {
  const SummaryStats s = summarize(episodes);
  return {iteration, s.mean_return, s.mean_duration, s.mean_deviation};
}

void check_audit(const std::vector<EpisodeSummary>& episodes, int iteration) {
  for (const EpisodeSummary& e : episodes) {
    if (e.violations > 0) {
      throw RuntimeFailure("limit violation in an audited training episode at iteration " +
                           std::to_string(iteration));
    }
  }
}

// ---------------------------------------------------------------------------

TrainResult train_cem(const EnvFactory& factory, const PreparedPaths& paths,
                      const TrainOptions& options, const TrainProgress& progress) {
  const CemOptions& opt = options.cem;
  TrainResult result;
  result.params = initial_params(factory, options);
  PolicyParams work = result.params;
  Eigen::VectorXd mean = result.params.net.parameters();
  Eigen::VectorXd var = Eigen::VectorXd::Constant(mean.size(), opt.init_std * opt.init_std);
  const double min_var = opt.min_std * opt.min_std;
  const std::size_t pop = static_cast<std::size_t>(opt.population);
  const std::size_t elites =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.elite_fraction * opt.population)));
  const std::size_t batch_size = static_cast<std::size_t>(opt.paths_per_iteration);
  long episode_counter = 0;

  for (int it = 0; it < options.budget; ++it) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(it) + 1));
    const std::vector<std::size_t> batch = sample_batch(paths.size(), opt.paths_per_iteration, rng);
    std::vector<Eigen::VectorXd> candidates(pop + 1);
    const Eigen::VectorXd std_dev = var.cwiseSqrt();
    for (std::size_t k = 0; k < pop; ++k) {
      candidates[k].resize(mean.size());
      for (Eigen::Index i = 0; i < mean.size(); ++i) candidates[k][i] = mean[i] + std_dev[i] * rng.normal();
    }
    // The last slot scores the current mean for the learning curve.
    candidates[pop] = mean;

    std::vector<PolicyParams> policies(pop + 1, work);
    for (std::size_t k = 0; k <= pop; ++k) policies[k].net.set_parameters(candidates[k]);
    std::vector<EpisodeSummary> episodes((pop + 1) * batch_size);
    const long base = episode_counter;
    for_each_index(episodes.size(), options.exec, [&](std::size_t e) {
      const std::size_t k = e / batch_size;
      Env env = factory.make();
      const bool audit =
          options.audit_every > 0 && (base + static_cast<long>(e)) % options.audit_every == 0;
      episodes[e] = run_episode(env, paths[batch[e % batch_size]],
                                deterministic_policy(policies[k], factory.limits, factory.config),
                                audit);
    });
    episode_counter += static_cast<long>(episodes.size());
    check_audit(episodes, it);

    std::vector<double> fitness(pop, 0.0);
    for (std::size_t k = 0; k < pop; ++k) {
      for (std::size_t b = 0; b < batch_size; ++b) fitness[k] += episodes[k * batch_size + b].ret;
      fitness[k] /= static_cast<double>(batch_size);
      require_finite(fitness[k], "candidate return", it);
    }
    candidates.pop_back();
    const std::vector<std::size_t> elite = select_elites(fitness, candidates, elites);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(mean.size());
    for (std::size_t k : elite) next += candidates[k];
    next /= static_cast<double>(elite.size());
    Eigen::VectorXd elite_var = Eigen::VectorXd::Zero(mean.size());
    for (std::size_t k : elite) elite_var += (candidates[k] - next).cwiseAbs2();
    elite_var /= static_cast<double>(elite.size());
    var = ((1.0 - opt.std_smoothing) * var + opt.std_smoothing * elite_var).cwiseMax(min_var);
    mean = next;
    require_finite(mean.squaredNorm(), "parameter norm", it);

    const std::vector<EpisodeSummary> scored(episodes.end() - static_cast<long>(batch_size), episodes.end());
    const CurvePoint point = curve_point(it, scored);
    require_finite(point.mean_return, "mean return", it);
    result.curve.push_back(point);
    if (progress) progress(point);
  }
  result.params.net.set_parameters(mean);
  return result;
}

// ---------------------------------------------------------------------------
// PPO-lite.

struct Adam {
  explicit Adam(Eigen::Index n, double lr) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)), lr(lr) {}
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
  Eigen::VectorXd m, v;
  double lr;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int t = 0;
};

struct Transition {
  Eigen::VectorXd x, pre;
  double logp = 0.0, reward = 0.0, value = 0.0;
};

struct Trajectory {
  std::vector<Transition> steps;
  /// Value of the state after the last step; zero when the episode ended in
  /// a failure.
  double bootstrap = 0.0;
  EpisodeSummary summary;
};

Trajectory collect(const EnvFactory& factory, const std::shared_ptr<const PreparedPath>& path,
                   const PolicyParams& params,
                   const Mlp& value, double value_scale, std::uint64_t seed, bool audit) {
  Rng rng(seed);
  Env env = factory.make();
  Trajectory traj;
  Observation obs = env.reset(path);
  const double total = path->path.total_length();
  double dev_sum = 0.0;
  EpisodeSummary& s = traj.summary;
  while (!env.done()) {
    Transition t;
    t.x = observation_features(obs, factory.limits, factory.config);
    const Eigen::VectorXd mean = params.net.forward(t.x);
    t.pre = mean;
    for (Eigen::Index j = 0; j < mean.size(); ++j) t.pre[j] += std::exp(params.log_std[j]) * rng.normal();
    t.logp = gaussian_log_prob(t.pre, mean, params.log_std);
    t.value = value.forward(t.x)[0] / value_scale;
    const KinematicState before = env.state();
    const StepResult r = env.step(Action::from(t.pre.array().tanh().matrix()));
    if (audit) {
      s.violations += count_violations(
          integrate_segment(before, r.a_next, factory.config.dt, kAuditSubsteps).first, factory.limits);
    }
    t.reward = r.reward.total;
    traj.steps.push_back(std::move(t));
    s.ret += r.reward.total;
    dev_sum += r.reward.d;
    ++s.steps;
    if (!s.reached_end && total - env.progress() <= kPathEndTolerance) {
      s.reached_end = true;
      s.time_to_end = env.time();
    }
    s.reason = r.reason;
    obs = r.obs;
  }
  if (!s.reached_end) s.time_to_end = env.time();
  s.mean_deviation = s.steps > 0 ? dev_sum / s.steps : 0.0;
  if (s.reason == DoneReason::kMaxSteps) {
    traj.bootstrap =
        value.forward(observation_features(obs, factory.limits, factory.config))[0] / value_scale;
  }
  return traj;
}

double global_norm_clip(Eigen::VectorXd& grad, double max_norm) {
  const double n = grad.norm();
  if (max_norm > 0.0 && n > max_norm) grad *= max_norm / n;
  return n;
}

TrainResult train_ppo(const EnvFactory& factory, const PreparedPaths& paths,
                      const TrainOptions& options, const TrainProgress& progress) {
  const PpoOptions& opt = options.ppo;
  TrainResult result;
  result.params = initial_params(factory, options);
  PolicyParams& policy = result.params;
  Rng init_rng(derive_seed(options.seed, 0x5641u));
  std::vector<int> value_sizes{policy.obs_dim()};
  value_sizes.insert(value_sizes.end(), opt.value_hidden.begin(), opt.value_hidden.end());
  value_sizes.push_back(1);
  Mlp value = Mlp::glorot(value_sizes, init_rng);
  // The value net predicts returns scaled by (1 - gamma).
  const double value_scale = 1.0 - opt.gamma + 1e-12;

  const Eigen::Index np = static_cast<Eigen::Index>(policy.net.parameter_count());
  const Eigen::Index na = policy.log_std.size();
  Eigen::VectorXd theta(np + na);
  theta << policy.net.parameters(), policy.log_std;
  Eigen::VectorXd phi = value.parameters();
  Adam policy_opt(theta.size(), opt.learning_rate);
  Adam value_opt(phi.size(), opt.learning_rate);
  long episode_counter = 0;

  for (int it = 0; it < options.budget; ++it) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(it) + 1));
    const std::vector<std::size_t> batch = sample_batch(paths.size(), opt.episodes_per_iteration, rng);
    std::vector<std::uint64_t> seeds;
    for (std::size_t e = 0; e < batch.size(); ++e) seeds.push_back(rng.next_u64());
    std::vector<Trajectory> trajs(batch.size());
    const long base = episode_counter;
    for_each_index(batch.size(), options.exec, [&](std::size_t e) {
      const bool audit =
          options.audit_every > 0 && (base + static_cast<long>(e)) % options.audit_every == 0;
      trajs[e] = collect(factory, paths[batch[e]], policy, value, value_scale, seeds[e], audit);
    });
    episode_counter += static_cast<long>(batch.size());

    // Generalized advantage estimation per trajectory.
    std::vector<const Transition*> flat;
    std::vector<double> adv, ret;
    std::vector<EpisodeSummary> summaries;
    for (const Trajectory& tr : trajs) {
      summaries.push_back(tr.summary);
      const std::size_t n = tr.steps.size();
      std::vector<double> a(n);
      double next_value = tr.bootstrap;
      double gae = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        const Transition& t = tr.steps[k];
        const double delta = t.reward + opt.gamma * next_value - t.value;
        gae = delta + opt.gamma * opt.lambda * gae;
        a[k] = gae;
        next_value = t.value;
      }
      for (std::size_t k = 0; k < n; ++k) {
        flat.push_back(&tr.steps[k]);
        adv.push_back(a[k]);
        ret.push_back(a[k] + tr.steps[k].value);
      }
    }
    check_audit(summaries, it);
    const double n = static_cast<double>(adv.size());
    const double adv_mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double adv_var = 0.0;
    for (double a : adv) adv_var += (a - adv_mean) * (a - adv_mean);
    const double adv_std = std::sqrt(adv_var / n) + 1e-8;
    for (double& a : adv) a = (a - adv_mean) / adv_std;

    std::vector<std::size_t> order(flat.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Mlp::Cache cache;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opt.minibatch)) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opt.minibatch));
        const double m = static_cast<double>(end - start);
        Eigen::VectorXd g_theta = Eigen::VectorXd::Zero(theta.size());
        Eigen::VectorXd g_net = Eigen::VectorXd::Zero(np);
        Eigen::VectorXd g_phi = Eigen::VectorXd::Zero(phi.size());
        double loss = 0.0;
        for (std::size_t q = start; q < end; ++q) {
          const std::size_t i = order[q];
          const Transition& t = *flat[i];
          const Eigen::VectorXd mean = policy.net.forward(t.x, cache);
          const double logp = gaussian_log_prob(t.pre, mean, policy.log_std);
          const double ratio = std::exp(logp - t.logp);
          const double a = adv[i];
          const double clipped = std::clamp(ratio, 1.0 - opt.clip, 1.0 + opt.clip);
          loss += -std::min(ratio * a, clipped * a);
          // The clipped branch has zero gradient.
          const bool active = ratio * a <= clipped * a;
          if (active) {
            Eigen::VectorXd g_mean(mean.size());
            for (Eigen::Index j = 0; j < mean.size(); ++j) {
              const double inv_var = std::exp(-2.0 * policy.log_std[j]);
              const double diff = t.pre[j] - mean[j];
              g_mean[j] = -a * ratio * diff * inv_var / m;
              g_theta[np + j] += -a * ratio * (diff * diff * inv_var - 1.0) / m;
            }
            policy.net.backward(cache, g_mean, g_net);
          }
          const Eigen::VectorXd v = value.forward(t.x, cache);
          const double err = v[0] - ret[i] * value_scale;
          loss += opt.value_coef * 0.5 * err * err;
          Eigen::VectorXd g_v(1);
          g_v[0] = opt.value_coef * err / m;
          value.backward(cache, g_v, g_phi);
        }
        require_finite(loss, "PPO loss", it);
        g_theta.head(np) = g_net;
        global_norm_clip(g_theta, opt.max_grad_norm);
        global_norm_clip(g_phi, opt.max_grad_norm);
        policy_opt.step(theta, g_theta);
        value_opt.step(phi, g_phi);
        policy.net.set_parameters(theta.head(np));
        policy.log_std = theta.tail(na);
        value.set_parameters(phi);
      }
    }
    require_finite(theta.squaredNorm(), "parameter norm", it);
    const CurvePoint point = curve_point(it, summaries);
    require_finite(point.mean_return, "mean return", it);
    result.curve.push_back(point);
    if (progress) progress(point);
  }
  return result;
}

}  // namespace

TrainResult train(const EnvFactory& factory, const std::vector<PathRecord>& dataset,
                  const TrainOptions& options, const TrainProgress& progress) {
  if (dataset.empty()) throw PreconditionError("train: the training dataset is empty");
  if (options.budget < 0) throw ConfigError("budget: must be >= 0");
  options.cem.validate();
  options.ppo.validate();
  std::vector<CubicPath> curves;
  for (const PathRecord& r : dataset) {
    if (r.dim != factory.dimension()) {
      throw PreconditionError("train: path " + r.id + " has " + std::to_string(r.dim) +
                              " joints, robot has " + std::to_string(factory.dimension()));
    }
    curves.push_back(r.path());
  }
  const PreparedPaths paths = prepare_paths(curves, factory.config, options.exec);
  return options.algorithm == Algorithm::kCem ? train_cem(factory, paths, options, progress)
                                              : train_ppo(factory, paths, options, progress);
}

}  // namespace ptrack
