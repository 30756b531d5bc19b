#ifndef GAUSSMAX_LIMITLAWS_HPP
#define GAUSSMAX_LIMITLAWS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace gaussmax::limitlaws {

struct NoSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double std_normal_cdf(double x);

// Survival function Psi(u) = P(W > u). Values below 1e-300 flush to 0.
double std_normal_survival(double u);

// Exceedance intensity mu(u) = H_alpha u^{2/alpha} Psi(u) per unit time.
double mu(double u, double alpha, double h_alpha);

struct Normalizers {
  double a = 0.0;  // scale sqrt(2 log T)
  double b = 0.0;  // location
  double T = 0.0;
  double alpha = 0.0;
  double h_alpha = 0.0;
};

// a_T = sqrt(2 log T),
// b_T = a_T + log(H_alpha (2 pi)^{-1/2} (2 log T)^{-1/2+1/alpha}) / a_T.
Normalizers normalizers(double T, double alpha, double h_alpha);

// Solves T mu(u) = theta for u on the decreasing branch
// [sqrt(2/alpha) + 1, 50]; |T mu(u) - theta| <= 1e-10 theta on return.
double solve_threshold(double T, double theta, double alpha, double h_alpha);

inline double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }
inline double gumbel_abs_cdf(double x) { return std::exp(-2.0 * std::exp(-x)); }

// Lambda_r(x) = E[ Lambda(x+r)^{exp(sqrt(2r)W) + exp(-sqrt(2r)W)} ]
// by Gauss-Hermite quadrature of the given order. The integrand is even in
// the Gaussian variable with its mode at zero; nodes are contracted to the
// mode curvature scale, which keeps order 64 accurate to ~1e-10 over
// (x, r) in [-3, 6] x [0, 2]. r = 0 collapses to exp(-2 e^{-x}) exactly.
double lambda_r_cdf(double x, double r, int quad_order = 64);

// CDF 2 Phi(x) - 1 of |W| on x >= 0.
double half_normal_cdf(double x);

// H_1 = 1, H_2 = 1/sqrt(pi); throws for other alpha (use the Monte Carlo
// estimator or supply a value).
double classical_pickands(double alpha);

// Gauss-Hermite nodes/weights for weight exp(-z^2) (physicists' convention).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Evaluable reference law for the experiment engine.
struct LimitLaw {
  enum class Kind { kGumbel, kGumbelAbs, kMixedGumbel, kHalfNormal };
  Kind kind = Kind::kGumbelAbs;
  double r = 0.0;  // MixedGumbel parameter

  double cdf(double x) const;
  std::string name() const;
  static LimitLaw gumbel() { return {Kind::kGumbel, 0.0}; }
  static LimitLaw gumbel_abs() { return {Kind::kGumbelAbs, 0.0}; }
  static LimitLaw mixed_gumbel(double r) { return {Kind::kMixedGumbel, r}; }
  static LimitLaw half_normal() { return {Kind::kHalfNormal, 0.0}; }
  static LimitLaw parse(const std::string& name, double r);
};

}  // namespace gaussmax::limitlaws

#endif  // GAUSSMAX_LIMITLAWS_HPP
