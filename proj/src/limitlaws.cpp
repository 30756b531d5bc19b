#include "gaussmax/limitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace gaussmax::limitlaws {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kUnderflowFloor = 1e-300;

// Nodes/weights cache per order; Newton on the physicists' Hermite
// recurrence (scaled to avoid overflow), standard Golub-Welsch alternative.
struct GaussHermiteTable {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteTable compute_gauss_hermite(int n) {
  GaussHermiteTable t;
  t.nodes.resize(n);
  t.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * t.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * t.nodes[1];
    else
      z = 2.0 * z - t.nodes[i - 2];

    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * (1.0 + std::fabs(z))) break;
    }
    t.nodes[i] = z;
    t.nodes[n - 1 - i] = -z;
    t.weights[i] = 2.0 / (pp * pp);
    t.weights[n - 1 - i] = t.weights[i];
  }
  // nodes[i] currently descending for the first half; store ascending
  std::reverse(t.nodes.begin(), t.nodes.end());
  std::reverse(t.weights.begin(), t.weights.end());
  return t;
}

const GaussHermiteTable& gauss_hermite_cached(int n) {
  static std::map<int, GaussHermiteTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_hermite(n)).first;
  return it->second;
}

}  // namespace

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, "gauss_hermite: order must be positive");
  const auto& t = gauss_hermite_cached(n);
  nodes = t.nodes;
  weights = t.weights;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_survival(double u) {
  require(std::isfinite(u), "std_normal_survival: u must be finite");
  double v = 0.5 * std::erfc(u / kSqrt2);
  return v < kUnderflowFloor ? 0.0 : v;
}

double mu(double u, double alpha, double h_alpha) {
  require(u > 0.0, "mu: u must be positive");
  require(alpha > 0.0 && alpha <= 2.0, "mu: alpha must lie in (0,2]");
  require(h_alpha > 0.0, "mu: Pickands constant must be positive");
  double v = h_alpha * std::pow(u, 2.0 / alpha) * std_normal_survival(u);
  return v < kUnderflowFloor ? 0.0 : v;
}

Normalizers normalizers(double T, double alpha, double h_alpha) {
  require(T > 1.0, "normalizers: T must exceed 1");
  require(alpha > 0.0 && alpha <= 2.0, "normalizers: alpha must lie in (0,2]");
  require(h_alpha > 0.0, "normalizers: Pickands constant must be positive");
  const double two_log_t = 2.0 * std::log(T);
  const double a = std::sqrt(two_log_t);
  const double log_term = std::log(h_alpha * std::pow(2.0 * std::numbers::pi, -0.5) *
                                   std::pow(two_log_t, -0.5 + 1.0 / alpha));
  require(std::isfinite(log_term), "normalizers: degenerate location term");
  return {a, a + log_term / a, T, alpha, h_alpha};
}

double solve_threshold(double T, double theta, double alpha, double h_alpha) {
  require(T > 1.0, "solve_threshold: T must exceed 1");
  require(theta > 0.0 && std::isfinite(theta), "solve_threshold: theta must be positive finite");
  double lo = std::sqrt(2.0 / alpha) + 1.0;  // past the maximizer of u^{2/a} Psi(u)
  double hi = 50.0;
  auto g = [&](double u) { return T * mu(u, alpha, h_alpha); };
  if (theta > g(lo))
    throw NoSolutionError("solve_threshold: theta exceeds T*mu at the lower bracket");
  if (theta < g(hi))
    throw NoSolutionError("solve_threshold: threshold beyond the bracket u=50");
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    double v = g(mid);
    if (std::fabs(v - theta) <= 1e-10 * theta) return mid;
    if (v > theta)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_r_cdf(double x, double r, int quad_order) {
  require(r >= 0.0, "lambda_r_cdf: r must be nonnegative");
  require(quad_order >= 16, "lambda_r_cdf: quadrature order must be >= 16");
  if (r == 0.0) return gumbel_abs_cdf(x);

  const double s = std::sqrt(2.0 * r);
  const double c = std::exp(-(x + r));
  // curvature of log integrand at its mode z = 0, contracted by 0.7
  const double sigma = std::min(1.0, 0.7 / std::sqrt(1.0 + 2.0 * s * s * c));
  const auto& gh = gauss_hermite_cached(quad_order);

  double acc = 0.0;
  const double norm = sigma * kSqrt2 / std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < quad_order; ++i) {
    const double y = gh.nodes[i];
    const double z = kSqrt2 * sigma * y;
    const double expo = -(std::exp(s * z) + std::exp(-s * z)) * c - 0.5 * z * z + y * y;
    acc += gh.weights[i] * std::exp(expo);
  }
  double v = acc * norm;
  return std::clamp(v, 0.0, 1.0);
}

double half_normal_cdf(double x) {
  require(x >= 0.0, "half_normal_cdf: supported on x >= 0");
  return std::erf(x / kSqrt2);
}

double classical_pickands(double alpha) {
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  throw std::invalid_argument(
      "classical_pickands: closed form known only for alpha = 1 and 2");
}

double LimitLaw::cdf(double x) const {
  switch (kind) {
    case Kind::kGumbel:
      return gumbel_cdf(x);
    case Kind::kGumbelAbs:
      return gumbel_abs_cdf(x);
    case Kind::kMixedGumbel:
      return lambda_r_cdf(x, r);
    case Kind::kHalfNormal:
      return x <= 0.0 ? 0.0 : half_normal_cdf(x);
  }
  return 0.0;
}

std::string LimitLaw::name() const {
  switch (kind) {
    case Kind::kGumbel:
      return "gumbel";
    case Kind::kGumbelAbs:
      return "gumbel-abs";
    case Kind::kMixedGumbel:
      return "lambda-r(r=" + std::to_string(r) + ")";
    case Kind::kHalfNormal:
      return "half-normal";
  }
  return "?";
}

LimitLaw LimitLaw::parse(const std::string& name, double r) {
  if (name == "gumbel") return gumbel();
  if (name == "gumbel-abs") return gumbel_abs();
  if (name == "lambda-r") return mixed_gumbel(r);
  if (name == "half-normal") return half_normal();
  throw std::invalid_argument("unknown law: " + name);
}

}  // namespace gaussmax::limitlaws
