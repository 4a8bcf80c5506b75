#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flatflow {

enum class ErrorCode {
  InvalidPolygon,
  UnpairedEdge,
  LengthMismatch,
  NotAntiparallel,
  Disconnected,
  BadConeAngle,
  IrrationalAngle,
  DegeneratePolygon,
  DegenerateDirection,
  VertexHit,
  BudgetExhausted,
  NonpositiveInput,
  InvalidArgument,
  Parse,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A geodesic ran into a cone point and is undefined beyond it.
class VertexHitError : public Error {
 public:
  VertexHitError(double t, int singularity)
      : Error(ErrorCode::VertexHit,
              "geodesic reaches singularity " + std::to_string(singularity) + " at t=" + std::to_string(t)),
        t_(t),
        singularity_(singularity) {}

  double time() const noexcept { return t_; }
  int singularity() const noexcept { return singularity_; }

 private:
  double t_;
  int singularity_;
};

}  // namespace flatflow
