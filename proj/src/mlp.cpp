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
#include "ptrack/mlp.hpp"

#include <cmath>
#include <string>

#include "ptrack/types.hpp"

namespace ptrack {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw PreconditionError("Mlp: need at least input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw PreconditionError("Mlp: layer sizes must be positive");
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[i + 1], sizes_[i]),
                       Eigen::VectorXd::Zero(sizes_[i + 1])});
  }
}

Mlp Mlp::glorot(std::vector<int> sizes, Rng& rng, double output_gain) {
  Mlp net(std::move(sizes));
  for (std::size_t k = 0; k < net.layers_.size(); ++k) {
    Layer& layer = net.layers_[k];
    double limit = std::sqrt(6.0 / static_cast<double>(layer.w.rows() + layer.w.cols()));
    if (k + 1 == net.layers_.size()) limit *= output_gain;
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) layer.w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) {
    throw PreconditionError("Mlp: input has " + std::to_string(x.size()) + " entries, expected " +
                            std::to_string(input_dim()));
  }
  Eigen::VectorXd h = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Eigen::VectorXd z = layers_[k].b;
    z.noalias() += layers_[k].w * h;
    if (k + 1 < layers_.size()) z = z.array().tanh();
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x, Cache& cache) const {
  if (x.size() != input_dim()) {
    throw PreconditionError("Mlp: input has " + std::to_string(x.size()) + " entries, expected " +
                            std::to_string(input_dim()));
  }
  cache.inputs.clear();
  Eigen::VectorXd h = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    cache.inputs.push_back(h);
    Eigen::VectorXd z = layers_[k].b;
    z.noalias() += layers_[k].w * h;
    if (k + 1 < layers_.size()) z = z.array().tanh();
    h = std::move(z);
  }
  cache.output = h;
  return h;
}

void Mlp::backward(const Cache& cache, const Eigen::VectorXd& grad_output,
                   Eigen::VectorXd& grad) const {
  if (grad.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw PreconditionError("Mlp::backward: gradient buffer has the wrong size");
  }
  // Offsets of every layer in the flat layout.
  std::vector<Eigen::Index> offset(layers_.size());
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    offset[k] = pos;
    pos += layers_[k].w.size() + layers_[k].b.size();
  }
  Eigen::VectorXd delta = grad_output;  // d loss / d pre-activation of layer k
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    const Eigen::VectorXd& in = cache.inputs[k];
    const Eigen::Index rows = layer.w.rows(), cols = layer.w.cols();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(
        grad.data() + offset[k], rows, cols);
    gw.noalias() += delta * in.transpose();
    grad.segment(offset[k] + rows * cols, rows) += delta;
    if (k == 0) break;
    // The input of layer k is tanh output of layer k - 1.
    Eigen::VectorXd back = layer.w.transpose() * delta;
    delta = back.array() * (1.0 - in.array().square());
  }
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (const Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) flat[pos++] = l.w(r, c);
    }
    flat.segment(pos, l.b.size()) = l.b;
    pos += l.b.size();
  }
  return flat;
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw PreconditionError("Mlp: expected " + std::to_string(parameter_count()) +
                            " parameters, got " + std::to_string(flat.size()));
  }
  Eigen::Index pos = 0;
  for (Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = flat[pos++];
    }
    l.b = flat.segment(pos, l.b.size());
    pos += l.b.size();
  }
}

}  // namespace ptrack
