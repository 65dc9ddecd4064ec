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
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptrack/dataset.hpp"
#include "ptrack/parallel.hpp"
#include "ptrack/policy.hpp"
#include "ptrack/rollout.hpp"

namespace ptrack {

enum class Algorithm { kCem, kPpo };
const char* to_string(Algorithm algo);
/// Throws ConfigError unless name is "cem" or "ppo".
Algorithm algorithm_from_string(const std::string& name);

/// Diagonal-Gaussian cross-entropy method over the flattened network
/// parameters. Every candidate is scored by its mean deterministic return on
/// the same batch of training paths.
struct CemOptions {
  int population = 64;
  double elite_fraction = 0.25;
  double init_std = 0.05;
  double min_std = 0.005;
  /// Weight of the elite variance in the per-parameter variance update.
  double std_smoothing = 0.1;
  int paths_per_iteration = 3;

  void validate() const;
};

struct PpoOptions {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double learning_rate = 3e-4;
  int episodes_per_iteration = 8;
  int epochs = 4;
  int minibatch = 256;
  double init_log_std = -0.5;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  std::vector<int> value_hidden{64, 64};

  void validate() const;
};

struct TrainOptions {
  Algorithm algorithm = Algorithm::kCem;
  /// Number of iterations.
  int budget = 100;
  std::uint64_t seed = 0;
  std::vector<int> hidden = kDefaultHiddenSizes;
  CemOptions cem;
  PpoOptions ppo;
  Execution exec = Execution::kParallel;
  /// Every audit_every-th training episode is re-integrated at
  /// kAuditSubsteps and checked against the limits; 0 disables the audit.
  int audit_every = 100;
};

struct CurvePoint {
  int iteration = 0;
  double mean_return = 0.0;
  double mean_duration = 0.0;
  double mean_deviation = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<CurvePoint> curve;
};

using TrainProgress = std::function<void(const CurvePoint&)>;

/// The initial parameters train() starts from for these options.
PolicyParams initial_params(const EnvFactory& factory, const TrainOptions& options);

/// Throws PreconditionError on an empty dataset and RuntimeFailure when a
/// return, loss or parameter becomes non-finite. Results depend only on the
/// inputs, not on the worker count.
TrainResult train(const EnvFactory& factory, const std::vector<PathRecord>& dataset,
                  const TrainOptions& options, const TrainProgress& progress = {});

/// Header "iteration,mean_return,mean_duration,mean_deviation".
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

/// Indices of the elite candidates, best first. Ties in fitness are broken by
/// the candidate vectors themselves, so the selection does not depend on the
/// order in which candidates are listed.
std::vector<std::size_t> select_elites(const std::vector<double>& fitness,
                                       const std::vector<Eigen::VectorXd>& candidates,
                                       std::size_t count);

}  // namespace ptrack
