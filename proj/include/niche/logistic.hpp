#pragma once

#include "niche/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace niche {

// E(u) = a(u,u)/2 + sum (mu|u|^3/3 - m u^2/2) vol - tau/2 <J*u, u>.
double energy(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params);
Vector energy_gradient(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params);
Matrix energy_hessian(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params);

// Largest defect of the weak equation tested against cell indicators,
// per unit volume and divided by ||m||_inf + tau + ||mu||_inf.
double weak_residual(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params);

enum class Clause { MassZero, MassPositive, Hostile, Threshold, Inconclusive };

const char* to_string(Clause c);

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct MinimizeOptions {
  double tol = 1e-9;          // weak residual
  double step_tol = 1e-12;    // Newton step, relative to max(1, |u|_inf)
  int max_iter = 600;
  int descent_iters = 20;     // plain gradient steps before Newton
  double survival_threshold = 1e-8;
};

struct SolveReport {
  Vector u;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
  bool survival = false;
  int iterations = 0;
  Clause clause = Clause::Inconclusive;
  std::vector<TraceRow> trace;
};

// eps * e / |e|_inf with eps = 0.1 |m+|_inf / |mu|_inf; constants when no
// principal pair exists.
Vector default_initial_guess(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                             const EigenPair* pair = nullptr);

SolveReport minimize_energy(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                            const Vector& init, const MinimizeOptions& opts = {});

struct SurvivalCriteria {
  double mass = 0.0;                    // sum (m + tau J*1) vol
  bool hostile = false;                 // m <= -tau everywhere
  bool vanishing = false;               // m == 0 and tau == 0
  std::optional<double> threshold_gap;  // lambda1 - 1 - tau <J*e, e>
  std::optional<double> lambda1;
  double qbar = 1.0;
  double coercivity = 0.0;  // (2/3) sum |m+tau|^3 mu^-2 vol, a lower bound for -E
  bool integrability_ok = true;
  Clause clause = Clause::Inconclusive;

  // nullopt when inconclusive
  std::optional<bool> predicts_survival() const;
};

double integrability_exponent(int dimension, double alpha, double beta, double s);
double coercivity_floor(const OperatorBundle& ops, const Vector& m, const ModelParams& params);

// Throws MissingEigenPair when the threshold test applies and no pair is given.
SurvivalCriteria classify_survival(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                                   const EigenPair* pair = nullptr);

// Classify, then minimize from the default guess.
SolveReport solve_logistic(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                           const MinimizeOptions& opts = {}, SurvivalCriteria* criteria = nullptr);

}  // namespace niche
