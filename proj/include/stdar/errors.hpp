// Copyright 2026 The stdar Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stdar {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kAssumptionViolated,
  kNonConvergedEigen,
  kInconsistentCase,
  kNoSolution,
  kRankDeficientD,
  kBracketingFailed,
  kInfeasibleMultiplier,
  kSingularM,
  kBoundaryTooClose,
  kNoSphereIntersection,
  kDisturbanceOutOfBounds,
  kNoFeasibleLambda,
  kFixedPointDiverged,
  kSingularPi,
  kDiverged,
  kParseError,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kAssumptionViolated: return "AssumptionViolated";
    case ErrorCode::kNonConvergedEigen: return "NonConvergedEigen";
    case ErrorCode::kInconsistentCase: return "InconsistentCase";
    case ErrorCode::kNoSolution: return "NoSolution";
    case ErrorCode::kRankDeficientD: return "RankDeficientD";
    case ErrorCode::kBracketingFailed: return "BracketingFailed";
    case ErrorCode::kInfeasibleMultiplier: return "InfeasibleMultiplier";
    case ErrorCode::kSingularM: return "SingularM";
    case ErrorCode::kBoundaryTooClose: return "BoundaryTooClose";
    case ErrorCode::kNoSphereIntersection: return "NoSphereIntersection";
    case ErrorCode::kDisturbanceOutOfBounds: return "DisturbanceOutOfBounds";
    case ErrorCode::kNoFeasibleLambda: return "NoFeasibleLambda";
    case ErrorCode::kFixedPointDiverged: return "FixedPointDiverged";
    case ErrorCode::kSingularPi: return "SingularPi";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Standing assumptions on the problem data.
enum class Assumption {
  kCostWeights,        // Q >= 0, R > 0, Pf >= 0, symmetric
  kStageBounds,        // alpha_k > 0, N >= 1
  kStabilizability,    // (A, B) stabilizable and (A, Q) detectable
  kRangeInclusion,     // range(G) in range(B)
  kTerminalCurvature,  // G' Pf G != 0
  kPositiveWeights,    // Q > 0, Pf > 0
};

constexpr std::string_view to_string(Assumption a) {
  switch (a) {
    case Assumption::kCostWeights: return "cost weights";
    case Assumption::kStageBounds: return "stage bounds";
    case Assumption::kStabilizability: return "stabilizability/detectability";
    case Assumption::kRangeInclusion: return "range inclusion";
    case Assumption::kTerminalCurvature: return "G'PfG != 0";
    case Assumption::kPositiveWeights: return "Q > 0, Pf > 0";
  }
  return "unknown";
}

class AssumptionViolated : public Error {
 public:
  AssumptionViolated(Assumption which, const std::string& detail)
      : Error(ErrorCode::kAssumptionViolated,
              std::string(to_string(which)) + ": " + detail),
        which_(which) {}

  Assumption which() const noexcept { return which_; }

 private:
  Assumption which_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& detail)
      : Error(ErrorCode::kParseError,
              (line > 0 ? "line " + std::to_string(line) + ": " : "") + detail),
        line_(line) {}

  /// 1-based line of the offending input, or 0 when not tied to a line.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace stdar
