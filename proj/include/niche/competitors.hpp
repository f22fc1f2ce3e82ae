#pragma once

#include "niche/resource.hpp"

namespace niche {

// Radial test profiles concentrating the favourable set on a small ball
// (plateau shapes) or excluding it from one (reflected shapes).
enum class Regime { Power, PowerReflected, Log2D, Log2DReflected, Log1D, Log1DReflected };

const char* to_string(Regime r);
bool reflected(Regime r);

struct CompetitorFamily {
  Regime regime = Regime::Log2D;
  double rho = 0.125;
  double gamma = 0.0;    // power regimes only
  double plateau = 1.0;  // c_star, or c_sharp for the reflected shapes

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Default power exponent 0.9 (n-2)/2 for n >= 3.
double default_gamma(int n);

// Inner radius from the measure constraint: |B_rho| equals the favourable
// share (plateau shapes) or the unfavourable share (reflected shapes) of |Omega|.
double competitor_radius(Regime regime, const Descriptors& d, int n, double omega_measure);

// Inverse of competitor_radius: keeps m0 and the descriptor on the other side
// fixed and solves for m_bar (plateau shapes) or m_under (reflected shapes).
Descriptors descriptors_for_radius(Regime regime, const Descriptors& base, int n, double rho, double omega_measure);

CompetitorFamily make_competitor(Regime regime, const Descriptors& d, double rho, double gamma = 0.0);

struct CompetitorSample {
  Vector interior;
  Vector exterior;
};

// Requires B_2 inside the domain and rho in (0, 1/4].
CompetitorSample competitor_profile(const CompetitorFamily& family, const Grid& grid);

struct CompetitorQuotient {
  double numerator = 0.0;
  double denominator = 0.0;
  double quotient = 0.0;
  BangBangResource resource;  // D = B_rho, or its complement
};

// Rayleigh quotient of the sampled competitor against its matching bang-bang
// resource, with the sampled exterior values in the Gagliardo form.
CompetitorQuotient competitor_rayleigh(const CompetitorFamily& family, const Descriptors& d,
                                       const OperatorBundle& ops, const Grid& grid);

namespace closed_form {

double ball_volume(int n);
double sphere_area(int n);

// int |grad phi|^2 over B_1 \ B_rho for the power profile, any n >= 3.
double power_gradient_energy(int n, double gamma, double rho);
// Same for the two-dimensional logarithmic profile: -2 pi / log rho.
double log2d_gradient_energy(double rho);

// m_bar int_D phi^2 - m_under int_{Omega \ D} phi^2 for the power profiles
// with B_2 inside Omega, at finite rho.
double power_denominator(int n, double gamma, double rho, const Descriptors& d, double omega_measure);
double power_reflected_denominator(int n, double gamma, double rho, const Descriptors& d, double omega_measure);

// Limits of the denominators along the concentrating regimes.
double denominator_limit(const Descriptors& d, double omega_measure);
double reflected_denominator_limit(const Descriptors& d, double omega_measure);

// Shape of the explicit one-dimensional lower bound for alpha > 0, without
// its constant.
double lower_bound_1d(const Descriptors& d);

}  // namespace closed_form

}  // namespace niche
