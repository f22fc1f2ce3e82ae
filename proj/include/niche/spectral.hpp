#pragma once

#include "niche/operators.hpp"

#include <string>
#include <vector>

namespace niche {

// Principal pair of a(e, .) = lambda (m e, .): e >= 0, sum m e^2 vol = 1.
struct EigenPair {
  double lambda1 = 0.0;
  Vector e;
  double residual = 0.0;           // ||Ae - lambda Be||_2
  double relative_residual = 0.0;  // residual / (||Ae|| + |lambda| ||Be||)
  double normalization_check = 0.0;
  int iterations = 0;
  bool dense = false;
};

struct SpectralOptions {
  double tol = 1e-12;       // Ritz residual, relative to the Ritz value
  int max_krylov = 600;
  Index dense_below = 160;  // use a full decomposition for small problems
};

EigenPair first_positive_eigen(const OperatorBundle& ops, const Vector& m, const SpectralOptions& opts = {});

// Finite eigenvalues of a(e,.) = lambda (m e,.), ascending, including the
// zero eigenvalue of the constants.
std::vector<double> full_spectrum(const OperatorBundle& ops, const Vector& m);

struct SimplicityReport {
  bool simple = false;
  int multiplicity = 0;
  double gap = 0.0;  // distance to the nearest other eigenvalue
  std::string diagnostics;
};

SimplicityReport simplicity_check(const EigenPair& pair, const std::vector<double>& spectrum, double tol = 1e-8);

// Same pencil, but the Rayleigh quotient a(u,u) / sum m u^2 vol.
double rayleigh_quotient(const OperatorBundle& ops, const Vector& m, const Vector& u);

}  // namespace niche
