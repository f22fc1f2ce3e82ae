#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace niche {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;

enum class ErrorKind {
  InvalidSpec,
  OutOfRange,
  DimensionMismatch,
  EmptyInterior,
  WeightDegenerate,
  MissingEigenPair,
  NotContained,
  Infeasible,
  Unresolved,
  Nonconvergence,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace niche
