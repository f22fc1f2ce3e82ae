#include "niche/spectral.hpp"

#include <algorithm>
#include <sstream>

namespace niche {

namespace {

// The stiffness is singular on constants. Adding c*b*b' with b = m .* vol
// makes it positive definite and leaves every pair with nonzero eigenvalue
// in place (those satisfy b'e = 0). The one extra pair of the shifted pencil
// is known in closed form: in the reduced variables its vector is L^{-1} b.
struct ShiftedPencil {
  Eigen::LLT<Matrix> llt;
  Vector b;
  Vector spurious;  // unit vector, reduced variables

  // y -> L^{-1} B L^{-T} y
  Vector apply(const Vector& y) const {
    Vector x = llt.matrixU().solve(y);
    x.array() *= b.array();
    llt.matrixL().solveInPlace(x);
    return x;
  }
  Vector to_original(const Vector& y) const { return llt.matrixU().solve(y); }
};

void check_weight(const OperatorBundle& ops, const Vector& m) {
  require(m.size() == ops.size(), ErrorKind::DimensionMismatch, "resource has wrong length");
  require(m.allFinite(), ErrorKind::InvalidSpec, "resource must be finite");
  require(m.maxCoeff() > 0 && m.minCoeff() < 0, ErrorKind::WeightDegenerate,
          "resource must take both signs");
  const Vector b = m.cwiseProduct(ops.volumes);
  require(std::abs(b.sum()) > 1e-13 * b.cwiseAbs().sum(), ErrorKind::WeightDegenerate,
          "resource has zero mean");
}

ShiftedPencil shift(const OperatorBundle& ops, const Vector& m) {
  ShiftedPencil p;
  p.b = m.cwiseProduct(ops.volumes);
  const double c = ops.stiffness.diagonal().maxCoeff() / p.b.squaredNorm();
  Matrix shifted = ops.stiffness;
  shifted.selfadjointView<Eigen::Lower>().rankUpdate(p.b, c);
  p.llt.compute(shifted);
  require(p.llt.info() == Eigen::Success, ErrorKind::WeightDegenerate,
          "regularized stiffness is not positive definite");
  p.spurious = p.llt.matrixL().solve(p.b);
  p.spurious.normalize();
  return p;
}

double relative_residual(const OperatorBundle& ops, const Vector& b, const Vector& e, double lambda) {
  const Vector ae = ops.stiffness * e;
  const Vector be = b.cwiseProduct(e);
  return (ae - lambda * be).norm() / (ae.norm() + std::abs(lambda) * be.norm());
}

void finish(const OperatorBundle& ops, const Vector& b, EigenPair& pair) {
  Vector& e = pair.e;
  if (e.dot(ops.volumes) < 0) e = -e;
  pair.lambda1 = e.dot(ops.stiffness * e) / e.dot(b.cwiseProduct(e));
  pair.relative_residual = relative_residual(ops, b, e, pair.lambda1);
  // A couple of inverse-iteration sweeps recover accuracy lost in the
  // triangular transforms when the shifted matrix is poorly conditioned.
  for (int sweep = 0; sweep < 3 && pair.relative_residual > 1e-11; ++sweep) {
    Matrix shifted = ops.stiffness;
    shifted.diagonal() -= pair.lambda1 * b;
    Vector x = shifted.partialPivLu().solve(b.cwiseProduct(e));
    if (!x.allFinite()) break;
    if (x.dot(ops.volumes) < 0) x = -x;
    const double lam = x.dot(ops.stiffness * x) / x.dot(b.cwiseProduct(x));
    const double res = relative_residual(ops, b, x, lam);
    if (!(res < pair.relative_residual)) break;
    e = x;
    pair.lambda1 = lam;
    pair.relative_residual = res;
  }
  const double scale = e.cwiseAbs().maxCoeff();
  for (Index i = 0; i < e.size(); ++i)
    if (std::abs(e[i]) < 1e-12 * scale) e[i] = 0.0;
  const double q = e.dot(b.cwiseProduct(e));
  require(q > 0, ErrorKind::MissingEigenPair, "principal vector has nonpositive weight");
  e /= std::sqrt(q);
  const Vector ae = ops.stiffness * e;
  const Vector be = b.cwiseProduct(e);
  pair.residual = (ae - pair.lambda1 * be).norm();
  pair.relative_residual = pair.residual / (ae.norm() + std::abs(pair.lambda1) * be.norm());
  pair.normalization_check = e.dot(be) - 1.0;
}

Matrix reduced_dense(const ShiftedPencil& p) {
  const Index n = p.b.size();
  Matrix linv = Matrix::Identity(n, n);
  p.llt.matrixL().solveInPlace(linv);
  Matrix c = linv * p.b.asDiagonal() * linv.transpose();
  return 0.5 * (c + c.transpose());
}

}  // namespace

EigenPair first_positive_eigen(const OperatorBundle& ops, const Vector& m, const SpectralOptions& opts) {
  check_weight(ops, m);
  const ShiftedPencil p = shift(ops, m);
  const Index n = ops.size();
  EigenPair pair;

  if (n <= opts.dense_below) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_dense(p));
    Index best = -1;
    for (Index k = n - 1; k >= 0; --k) {
      if (std::abs(es.eigenvectors().col(k).dot(p.spurious)) > 0.5) continue;
      if (es.eigenvalues()[k] > 0) best = k;
      break;
    }
    require(best >= 0, ErrorKind::MissingEigenPair, "no positive eigenvalue");
    pair.e = p.to_original(es.eigenvectors().col(best));
    pair.dense = true;
    finish(ops, p.b, pair);
    return pair;
  }

  // Lanczos with full reorthogonalization on the deflated reduced operator.
  const int kmax = static_cast<int>(std::min<Index>(opts.max_krylov, n - 1));
  Matrix q(n, kmax + 1);
  std::vector<double> diag, off;
  Vector start = (m.array() > 0).cast<double>().matrix();
  start = p.llt.matrixU() * start;
  start -= p.spurious.dot(start) * p.spurious;
  start.normalize();
  q.col(0) = start;

  Vector ritz;
  double theta = 0.0;
  bool converged = false;
  int k = 0;
  for (; k < kmax; ++k) {
    Vector z = p.apply(q.col(k));
    const double a = q.col(k).dot(z);
    diag.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      z -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * z);
      z -= p.spurious.dot(z) * p.spurious;
    }
    const double beta = z.norm();
    const bool exhausted = beta < 1e-14 * std::max(1.0, std::abs(a));
    const bool check = exhausted || k % 5 == 4 || k + 1 == kmax;
    if (check) {
      const int dim = k + 1;
      Matrix t = Matrix::Zero(dim, dim);
      for (int i = 0; i < dim; ++i) t(i, i) = diag[static_cast<std::size_t>(i)];
      for (int i = 0; i + 1 < dim; ++i) t(i, i + 1) = t(i + 1, i) = off[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Matrix> es(t);
      theta = es.eigenvalues()[dim - 1];
      ritz = es.eigenvectors().col(dim - 1);
      const double est = beta * std::abs(ritz[dim - 1]);
      if (theta > 0 && (exhausted || est <= opts.tol * theta)) {
        converged = true;
        ++k;
        break;
      }
      if (exhausted) {
        ++k;
        break;
      }
    }
    off.push_back(beta);
    q.col(k + 1) = z / beta;
  }
  require(converged, ErrorKind::Nonconvergence, "Lanczos did not converge for the principal eigenvalue");
  pair.e = p.to_original(q.leftCols(ritz.size()) * ritz);
  pair.iterations = k;
  finish(ops, p.b, pair);
  return pair;
}

std::vector<double> full_spectrum(const OperatorBundle& ops, const Vector& m) {
  check_weight(ops, m);
  const ShiftedPencil p = shift(ops, m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_dense(p));
  const Index n = ops.size();
  Index spurious = 0;
  double overlap = -1.0;
  for (Index k = 0; k < n; ++k) {
    const double o = std::abs(es.eigenvectors().col(k).dot(p.spurious));
    if (o > overlap) {
      overlap = o;
      spurious = k;
    }
  }
  const double big = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<double> out{0.0};
  for (Index k = 0; k < n; ++k) {
    const double mu = es.eigenvalues()[k];
    if (k == spurious || std::abs(mu) <= 1e-13 * big) continue;
    out.push_back(1.0 / mu);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SimplicityReport simplicity_check(const EigenPair& pair, const std::vector<double>& spectrum, double tol) {
  SimplicityReport r;
  r.gap = std::numeric_limits<double>::infinity();
  const double lam = pair.lambda1;
  for (double v : spectrum) {
    const double d = std::abs(v - lam);
    if (d <= tol * std::max(1.0, std::abs(lam)))
      ++r.multiplicity;
    else
      r.gap = std::min(r.gap, d);
  }
  double low = std::numeric_limits<double>::infinity();
  for (double v : spectrum)
    if (v > 0) low = std::min(low, v);
  r.simple = r.multiplicity == 1;
  std::ostringstream os;
  os << "multiplicity " << r.multiplicity << ", gap " << r.gap;
  if (std::abs(low - lam) > tol * std::max(1.0, std::abs(lam))) os << ", not the smallest positive eigenvalue";
  if (r.multiplicity == 1 && std::abs(low - lam) > tol * std::max(1.0, std::abs(lam))) r.simple = false;
  r.diagnostics = os.str();
  return r;
}

double rayleigh_quotient(const OperatorBundle& ops, const Vector& m, const Vector& u) {
  require(m.size() == ops.size() && u.size() == ops.size(), ErrorKind::DimensionMismatch, "wrong length");
  const double den = weight_form(m, u, ops);
  require(den > 0, ErrorKind::WeightDegenerate, "Rayleigh quotient needs a positive weighted norm");
  return bilinear(ops, u, u) / den;
}

}  // namespace niche
