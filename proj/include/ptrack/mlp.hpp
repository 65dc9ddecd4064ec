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

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "ptrack/rng.hpp"

namespace ptrack {

/// Fully connected network with tanh hidden layers and a linear output
/// layer. Parameters are stored per layer; parameters() flattens them as
/// (W row-major, b) for every layer in order.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
  };

  /// Activations of one forward pass, kept for backward().
  struct Cache {
    std::vector<Eigen::VectorXd> inputs;  // input of every layer
    Eigen::VectorXd output;
  };

  Mlp() = default;
  /// All-zero network with the given layer sizes (input first, output last).
  explicit Mlp(std::vector<int> sizes);
  /// Glorot-uniform weights, zero biases; the last layer is scaled by
  /// output_gain.
  static Mlp glorot(std::vector<int> sizes, Rng& rng, double output_gain = 1.0);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t parameter_count() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x, Cache& cache) const;
  /// Adds d(loss)/d(parameters) to grad, given d(loss)/d(output) for the
  /// pass recorded in cache.
  void backward(const Cache& cache, const Eigen::VectorXd& grad_output,
                Eigen::VectorXd& grad) const;

  Eigen::VectorXd parameters() const;
  /// Throws PreconditionError when the length differs from parameter_count().
  void set_parameters(const Eigen::VectorXd& flat);

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
};

}  // namespace ptrack
