#include "niche/logistic.hpp"

#include <algorithm>

namespace niche {

const char* to_string(Clause c) {
  switch (c) {
    case Clause::MassZero: return "mass_zero";
    case Clause::MassPositive: return "mass_positive";
    case Clause::Hostile: return "hostile";
    case Clause::Threshold: return "threshold";
    case Clause::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

struct Terms {
  Vector mu;
  const Matrix* conv = nullptr;
};

Terms terms(const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  require(m.size() == ops.size(), ErrorKind::DimensionMismatch, "resource has wrong length");
  require(m.allFinite(), ErrorKind::InvalidSpec, "resource must be finite");
  Terms t;
  t.mu = params.saturation_or(ops.size());
  require(t.mu.size() == ops.size(), ErrorKind::DimensionMismatch, "saturation has wrong length");
  if (params.tau > 0) {
    require(ops.convolution.rows() == ops.size(), ErrorKind::InvalidSpec,
            "pollination needs a dispersal kernel in the operator bundle");
    t.conv = &ops.convolution;
  }
  return t;
}

}  // namespace

double energy(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  const Terms t = terms(ops, m, params);
  const auto a = u.array();
  double e = 0.5 * u.dot(ops.stiffness * u) +
             ((t.mu.array() * a.abs().cube() / 3.0 - m.array() * a.square() / 2.0) * ops.volumes.array()).sum();
  if (t.conv) e -= 0.5 * params.tau * u.dot(*t.conv * u);
  return e;
}

Vector energy_gradient(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  const Terms t = terms(ops, m, params);
  Vector g = ops.stiffness * u;
  g.array() += ops.volumes.array() * (t.mu.array() * u.array().abs() * u.array() - m.array() * u.array());
  if (t.conv) g -= params.tau * (*t.conv * u);
  return g;
}

Matrix energy_hessian(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  const Terms t = terms(ops, m, params);
  Matrix h = ops.stiffness;
  h.diagonal().array() += ops.volumes.array() * (2.0 * t.mu.array() * u.array().abs() - m.array());
  if (t.conv) h -= params.tau * *t.conv;
  return h;
}

double weak_residual(const Vector& u, const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  const Vector g = energy_gradient(u, ops, m, params);
  const Vector mu = params.saturation_or(ops.size());
  const double scale = m.cwiseAbs().maxCoeff() + params.tau + mu.cwiseAbs().maxCoeff();
  return g.cwiseQuotient(ops.volumes).cwiseAbs().maxCoeff() / scale;
}

Vector default_initial_guess(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                             const EigenPair* pair) {
  const Vector mu = params.saturation_or(ops.size());
  const double mplus = std::max(m.maxCoeff(), 0.0);
  double eps = 0.1 * std::max(mplus, params.tau) / mu.cwiseAbs().maxCoeff();
  if (eps == 0.0) eps = 0.1;
  if (pair && pair->e.size() == ops.size() && pair->e.maxCoeff() > 0)
    return eps * pair->e / pair->e.cwiseAbs().maxCoeff();
  return Vector::Constant(ops.size(), eps);
}

SolveReport minimize_energy(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                            const Vector& init, const MinimizeOptions& opts) {
  require(init.size() == ops.size() && init.allFinite(), ErrorKind::DimensionMismatch, "bad initial guess");
  SolveReport rep;
  Vector u = init.cwiseAbs();
  double e = energy(u, ops, m, params);
  const double c1 = 1e-4;

  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector g = energy_gradient(u, ops, m, params);
    const double res = weak_residual(u, ops, m, params);

    Vector dir;
    if (it < opts.descent_iters) {
      dir = -g.cwiseQuotient(ops.volumes);
    } else {
      // Newton, with a mass-matrix shift until the Hessian is positive definite.
      Matrix h = energy_hessian(u, ops, m, params);
      double shift = 0.0;
      const double hscale = h.diagonal().cwiseAbs().maxCoeff();
      Eigen::LLT<Matrix> llt;
      for (int tries = 0; tries < 60; ++tries) {
        Matrix hs = h;
        hs.diagonal() += shift * ops.volumes;
        llt.compute(hs);
        if (llt.info() == Eigen::Success) break;
        shift = shift == 0.0 ? 1e-10 * hscale / ops.volumes.maxCoeff() : 4 * shift;
      }
      dir = llt.info() == Eigen::Success ? Vector(-llt.solve(g)) : Vector(-g.cwiseQuotient(ops.volumes));
    }
    const double step_norm = dir.cwiseAbs().maxCoeff();
    rep.trace.push_back({it, e, res, step_norm});

    const bool small_step = step_norm <= opts.step_tol * std::max(1.0, u.cwiseAbs().maxCoeff());
    if (res <= opts.tol && (it >= opts.descent_iters && small_step)) {
      rep.converged = true;
      rep.iterations = it;
      break;
    }
    if (g.squaredNorm() == 0.0) {
      rep.converged = true;
      rep.iterations = it;
      break;
    }

    double slope = g.dot(dir);
    if (slope >= 0) {
      dir = -g.cwiseQuotient(ops.volumes);
      slope = g.dot(dir);
    }
    // Backtracking; the first gradient steps need a sensible initial length.
    double t = 1.0;
    if (it < opts.descent_iters) {
      const double curv = dir.dot(ops.stiffness * dir) + dir.squaredNorm() * ops.volumes.maxCoeff();
      if (curv > 0) t = std::min(1.0, -slope / curv);
    }
    Vector trial;
    double et = e;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = (u + t * dir).cwiseAbs();
      et = energy(trial, ops, m, params);
      if (et <= e + c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No further decrease is representable; accept if stationary enough.
      rep.converged = res <= opts.tol;
      rep.iterations = it;
      break;
    }
    // At the roundoff floor the Newton step is noise; stop once the energy no longer moves.
    const bool stalled = std::abs(e - et) <= 4e-16 * std::abs(e);
    u = trial;
    e = et;
    rep.iterations = it + 1;
    if (stalled && res <= opts.tol && it >= opts.descent_iters) {
      rep.converged = true;
      break;
    }
  }
  rep.u = u;
  rep.energy = energy(u, ops, m, params);
  rep.residual = weak_residual(u, ops, m, params);
  rep.survival = u.cwiseAbs().maxCoeff() > opts.survival_threshold;
  return rep;
}

double coercivity_floor(const OperatorBundle& ops, const Vector& m, const ModelParams& params) {
  const Vector mu = params.saturation_or(ops.size());
  return 2.0 / 3.0 *
         ((m.array() + params.tau).abs().cube() / mu.array().square() * ops.volumes.array()).sum();
}

double integrability_exponent(int n, double alpha, double beta, double s) {
  if (beta == 0.0 && alpha > 0 && n > 2) return n / 2.0;
  if (beta != 0.0 && n > 2 * s) return n / (2 * s);
  return 1.0;
}

std::optional<bool> SurvivalCriteria::predicts_survival() const {
  switch (clause) {
    case Clause::MassZero:
    case Clause::Hostile: return false;
    case Clause::MassPositive:
    case Clause::Threshold: return true;
    case Clause::Inconclusive: break;
  }
  return std::nullopt;
}

SurvivalCriteria classify_survival(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                                   const EigenPair* pair) {
  const Terms t = terms(ops, m, params);
  SurvivalCriteria c;
  c.qbar = integrability_exponent(ops.dimension, params.alpha, params.beta, params.s);
  Vector spread = Vector::Zero(ops.size());
  if (t.conv) spread = (*t.conv * Vector::Ones(ops.size())).cwiseQuotient(ops.volumes);
  c.mass = ((m + params.tau * spread).array() * ops.volumes.array()).sum();
  c.hostile = (m.array() <= -params.tau).all();
  c.vanishing = params.tau == 0.0 && (m.array() == 0.0).all();
  c.coercivity = coercivity_floor(ops, m, params);
  c.integrability_ok = std::isfinite(c.coercivity);

  const double mean = m.dot(ops.volumes);
  if (!c.vanishing && !c.hostile && !(c.mass > 0) && mean < 0 && m.maxCoeff() > 0) {
    require(pair != nullptr, ErrorKind::MissingEigenPair,
            "the pollination threshold needs the principal eigenpair");
    c.lambda1 = pair->lambda1;
    const double pollination = t.conv ? pair->e.dot(*t.conv * pair->e) : 0.0;
    c.threshold_gap = pair->lambda1 - 1.0 - params.tau * pollination;
  }

  if (c.vanishing)
    c.clause = Clause::MassZero;
  else if (c.hostile)
    c.clause = Clause::Hostile;
  else if (c.mass > 0)
    c.clause = Clause::MassPositive;
  else if (c.threshold_gap && *c.threshold_gap < 0)
    c.clause = Clause::Threshold;
  return c;
}

SolveReport solve_logistic(const OperatorBundle& ops, const Vector& m, const ModelParams& params,
                           const MinimizeOptions& opts, SurvivalCriteria* criteria) {
  std::optional<EigenPair> pair;
  const bool signed_weight = m.maxCoeff() > 0 && m.minCoeff() < 0 && std::abs(m.dot(ops.volumes)) > 0;
  if (signed_weight) pair = first_positive_eigen(ops, m);
  SurvivalCriteria c = classify_survival(ops, m, params, pair ? &*pair : nullptr);
  SolveReport rep = minimize_energy(ops, m, params, default_initial_guess(ops, m, params, pair ? &*pair : nullptr), opts);
  rep.clause = c.clause;
  if (criteria) *criteria = c;
  return rep;
}

}  // namespace niche
