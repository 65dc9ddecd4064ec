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

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ptrack {

/// Joint-space vector (rad, rad/s, ... depending on context).
using JointVector = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (robot files, flags, dataset files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with inputs violating its documented contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during a computation (infeasible TOPP stage, NaN loss).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ptrack
