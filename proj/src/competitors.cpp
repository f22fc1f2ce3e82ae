#include "niche/competitors.hpp"

#include <cmath>

namespace niche {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Power: return "power";
    case Regime::PowerReflected: return "power-reflected";
    case Regime::Log2D: return "log2d";
    case Regime::Log2DReflected: return "log2d-reflected";
    case Regime::Log1D: return "log1d";
    case Regime::Log1DReflected: return "log1d-reflected";
  }
  return "power";
}

bool reflected(Regime r) {
  return r == Regime::PowerReflected || r == Regime::Log2DReflected || r == Regime::Log1DReflected;
}

namespace {

bool is_power(Regime r) { return r == Regime::Power || r == Regime::PowerReflected; }

}  // namespace

double CompetitorFamily::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double r = x.norm();
  double bump;
  if (r < rho)
    bump = 1.0;
  else if (r >= 1.0)
    bump = 0.0;
  else if (is_power(regime))
    bump = std::pow(rho, gamma) / (1.0 - std::pow(rho, gamma)) * (std::pow(r, -gamma) - 1.0);
  else
    bump = std::log(r) / std::log(rho);
  return reflected(regime) ? plateau - bump : plateau + bump;
}

double default_gamma(int n) { return 0.9 * (n - 2) / 2.0; }

double competitor_radius(Regime regime, const Descriptors& d, int n, double omega_measure) {
  d.validate();
  const double share = reflected(regime) ? (d.m_bar - d.m0) / (d.m_under + d.m_bar) : d.favourable_fraction();
  return std::pow(share * omega_measure / closed_form::ball_volume(n), 1.0 / n);
}

Descriptors descriptors_for_radius(Regime regime, const Descriptors& base, int n, double rho, double omega_measure) {
  require(rho > 0 && omega_measure > 0, ErrorKind::OutOfRange, "need rho > 0 and a positive domain measure");
  const double share = closed_form::ball_volume(n) * std::pow(rho, n) / omega_measure;
  Descriptors d = base;
  if (reflected(regime))
    d.m_under = (d.m_bar - d.m0) / share - d.m_bar;
  else
    d.m_bar = (d.m_under + d.m0) / share - d.m_under;
  d.validate();
  return d;
}

CompetitorFamily make_competitor(Regime regime, const Descriptors& d, double rho, double gamma) {
  d.validate();
  require(rho > 0 && rho < 1, ErrorKind::OutOfRange, "inner radius must lie in (0,1)");
  if (is_power(regime)) require(gamma > 0, ErrorKind::InvalidSpec, "power profiles need gamma > 0");
  return {regime, rho, gamma, reflected(regime) ? d.c_sharp() : d.c_star()};
}

CompetitorSample competitor_profile(const CompetitorFamily& family, const Grid& grid) {
  require(grid.contains_ball(Eigen::VectorXd::Zero(grid.dimension()), 2.0), ErrorKind::NotContained,
          "domain must contain the ball of radius 2 about the origin");
  require(family.rho > 0 && family.rho <= 0.25, ErrorKind::OutOfRange, "inner radius must lie in (0, 1/4]");
  CompetitorSample out;
  out.interior.resize(grid.interior_size());
  out.exterior.resize(grid.exterior_size());
  for (Index i = 0; i < grid.interior_size(); ++i) out.interior[i] = family(grid.interior_centroids().col(i));
  for (Index x = 0; x < grid.exterior_size(); ++x) out.exterior[x] = family(grid.exterior_centroids().col(x));
  return out;
}

CompetitorQuotient competitor_rayleigh(const CompetitorFamily& family, const Descriptors& d,
                                       const OperatorBundle& ops, const Grid& grid) {
  require(ops.size() == grid.interior_size(), ErrorKind::DimensionMismatch, "bundle does not match grid");
  const CompetitorSample u = competitor_profile(family, grid);
  std::vector<Index> cells;
  for (Index i = 0; i < grid.interior_size(); ++i) {
    const bool inner = grid.interior_centroids().col(i).norm() < family.rho;
    if (inner != reflected(family.regime)) cells.push_back(i);
  }
  require(!cells.empty() && static_cast<Index>(cells.size()) < grid.interior_size(), ErrorKind::Infeasible,
          "inner ball is not resolved by the grid");

  CompetitorQuotient q;
  q.resource = make_bang_bang(std::move(cells), d, grid);
  q.numerator = ops.alpha * u.interior.dot(ops.local * u.interior);
  if (ops.beta > 0) {
    require(ops.weights != nullptr, ErrorKind::InvalidSpec, "bundle carries no singular weights");
    q.numerator += 0.5 * ops.beta * gagliardo(u.interior, u.exterior, *ops.weights);
  }
  q.denominator = weight_form(q.resource.values, u.interior, ops);
  require(q.denominator > 0, ErrorKind::Infeasible, "competitor denominator is not positive at this radius");
  q.quotient = q.numerator / q.denominator;
  return q;
}

namespace closed_form {

double ball_volume(int n) { return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

double sphere_area(int n) { return n * ball_volume(n); }

double power_gradient_energy(int n, double gamma, double rho) {
  const double e = n - 2 - 2 * gamma;
  require(n >= 3 && gamma > 0 && e > 0, ErrorKind::OutOfRange, "need n >= 3 and 0 < gamma < (n-2)/2");
  const double a = std::pow(rho, gamma) / (1 - std::pow(rho, gamma));
  return a * a * gamma * gamma * sphere_area(n) * (1 - std::pow(rho, e)) / e;
}

double log2d_gradient_energy(double rho) { return -2.0 * M_PI / std::log(rho); }

namespace {

// int over B_1 \ B_rho of (b + sign a |x|^-gamma)^2
double annulus_square(int n, double gamma, double rho, double b, double a, double sign) {
  const double i0 = (1 - std::pow(rho, n)) / n;
  const double i1 = (1 - std::pow(rho, n - gamma)) / (n - gamma);
  const double i2 = (1 - std::pow(rho, n - 2 * gamma)) / (n - 2 * gamma);
  return sphere_area(n) * (b * b * i0 + 2 * sign * a * b * i1 + a * a * i2);
}

void check_geometry(int n, double gamma, double rho, double omega_measure) {
  require(n >= 3 && gamma > 0 && 2 * gamma < n - 2, ErrorKind::OutOfRange, "need n >= 3 and 0 < gamma < (n-2)/2");
  require(rho > 0 && rho < 1, ErrorKind::OutOfRange, "inner radius must lie in (0,1)");
  require(omega_measure >= ball_volume(n) * std::pow(2.0, n), ErrorKind::NotContained,
          "domain too small to contain the ball of radius 2");
}

}  // namespace

double power_denominator(int n, double gamma, double rho, const Descriptors& d, double omega_measure) {
  d.validate();
  check_geometry(n, gamma, rho, omega_measure);
  const double c = d.c_star();
  const double a = std::pow(rho, gamma) / (1 - std::pow(rho, gamma));
  const double inner = (c + 1) * (c + 1) * ball_volume(n) * std::pow(rho, n);
  const double outer = c * c * (omega_measure - ball_volume(n)) + annulus_square(n, gamma, rho, c - a, a, 1.0);
  return d.m_bar * inner - d.m_under * outer;
}

double power_reflected_denominator(int n, double gamma, double rho, const Descriptors& d, double omega_measure) {
  d.validate();
  check_geometry(n, gamma, rho, omega_measure);
  const double c = d.c_sharp();
  const double a = std::pow(rho, gamma) / (1 - std::pow(rho, gamma));
  const double inner = (c - 1) * (c - 1) * ball_volume(n) * std::pow(rho, n);
  const double outer = c * c * (omega_measure - ball_volume(n)) + annulus_square(n, gamma, rho, c + a, a, -1.0);
  return d.m_bar * outer - d.m_under * inner;
}

double denominator_limit(const Descriptors& d, double omega_measure) {
  d.validate();
  return -d.m_under * (d.m_under + d.m0) * omega_measure / d.m0;
}

double reflected_denominator_limit(const Descriptors& d, double omega_measure) {
  d.validate();
  return -d.m_bar * (d.m_bar - d.m0) * omega_measure / d.m0;
}

double lower_bound_1d(const Descriptors& d) {
  d.validate();
  const double mb = d.m_bar, mu = d.m_under, m0 = d.m0;
  return -m0 * m0 * m0 * std::pow(mu + mb, 4) /
         (mb * mu * mu * mu * (mb - m0) * (mb - m0) * (mb * (2 * mu + m0) - mu * m0));
}

}  // namespace closed_form

}  // namespace niche
