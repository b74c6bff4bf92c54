// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace recurlab {

using Complex = std::complex<double>;

inline constexpr const char *kVersion = "0.1.0";

/// Dense statevector cap (total qubits). Larger layouts fail fast.
inline constexpr int kQubitCap = 24;

// Construction / reconstruction tolerances, all scaled by dimension
// where noted at the use site.
inline constexpr double kUnitaryTolPerDim = 1e-10;
inline constexpr double kReconstructTolPerDim = 1e-9;
inline constexpr double kStateNormTol = 1e-10;
inline constexpr double kPhaseClusterGap = 1e-8;
inline constexpr double kUnitEigenvalueTol = 1e-9;
inline constexpr double kExactSetSumTol = 1e-9;

class RecurlabError : public std::runtime_error {
  public:
    explicit RecurlabError(const std::string &msg) : std::runtime_error(msg) {}
};

class InvalidDimensionError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class InvalidOperatorError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class InvalidArgumentError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class IndexOutOfRangeError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class DimensionMismatchError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class LengthMismatchError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

/// Register or operator exceeds the dense simulation budget.
class SizingError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class CapExceededError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class UnreachableConfidenceError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class RankMismatchError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class RankDeficiencyError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class NotWdsaError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class PremiseViolationError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

class IoError : public RecurlabError {
  public:
    using RecurlabError::RecurlabError;
};

} // namespace recurlab
