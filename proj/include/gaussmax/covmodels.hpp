#ifndef GAUSSMAX_COVMODELS_HPP
#define GAUSSMAX_COVMODELS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gaussmax::covmodels {

enum class Family { kWeak, kB1, kB2, kUserTable };

enum class Regime { kBerman, kStrongFinite, kStrongInfinite, kUndetermined };

// Stationary correlation function r(t) with local behaviour
// 1 - r(t) ~ |t|^alpha near zero (local coefficient fixed at 1 for the
// shipped families). Immutable after construction; eval() is pure.
//
// Shipped families:
//   weak(alpha)   r(t) = exp(-|t|^alpha),                  alpha in (0,2]
//   b1(alpha, r)  r(t) = max(1-|t|^alpha, r/log(e+t)),     alpha in (0,1]
//   b2(alpha)     r(t) = max(1-|t|^alpha, log(e^4+t)^-1/2), alpha in (0,1]
// b1/b2 are correlations by Polya's criterion (convex, nonincreasing, ->0).
class CorrelationModel {
 public:
  static CorrelationModel weak(double alpha);
  static CorrelationModel b1(double alpha, double r);
  static CorrelationModel b2(double alpha);
  // Autocorrelation table r(k*lag_step), k = 0..len-1; linear interpolation
  // between lags, error beyond the last lag. values[0] must be 1 (1e-12).
  static CorrelationModel from_table(std::vector<double> values, double lag_step,
                                     double alpha = 1.0);
  static CorrelationModel load_table_csv(const std::string& path, double alpha = 1.0);

  double eval(double t) const;

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double local_coeff() const { return 1.0; }
  double r_target() const { return r_; }
  // largest lag at which eval() is defined (infinity for closed forms)
  double max_lag() const;
  std::uint64_t hash() const;
  std::string name() const;

 private:
  CorrelationModel() = default;
  Family family_ = Family::kWeak;
  double alpha_ = 1.0;
  double r_ = 0.0;
  double lag_step_ = 0.0;
  std::vector<double> table_;
};

// rho_{n,T}(t) = (r(t) - r(T)) / (1 - r(T)), the residual correlation after
// subtracting the common level at horizon T.
double residual_correlation(const CorrelationModel& model, double t, double T);

struct RegimeReport {
  double limit_estimate = 0.0;
  Regime classification = Regime::kUndetermined;
  std::vector<std::pair<double, double>> probe_values;  // (t, r(t) log t)
};

// Probes r(t) log t on a geometric grid and classifies the dependence
// regime. Thresholds: Berman below 0.01; strongly-infinite above 3 and
// increasing over the last three probes; strongly-finite when the last three
// probes agree within 10% relative spread.
RegimeReport regime_diagnostics(const CorrelationModel& model, double t_max,
                                int n_probes);

struct PolyaReport {
  enum class Violation { kNone, kNotNonincreasing, kNotConvex, kValueRange, kLimitNotZero };
  bool pass = false;
  Violation first_violation = Violation::kNone;
  double violating_lag = 0.0;
  double r_at_tmax = 0.0;
};

// Checks the Polya certificate on a grid sweep: r(0)=1, |r|<=1, nonincreasing,
// convex (second differences >= -1e-10), and r(t_max) below 0.25. A failed
// convexity check with clean value-range checks marks a valid correlation
// that simply lacks the Polya certificate.
PolyaReport validate_polya(const CorrelationModel& model, double grid_step,
                           double t_max);

const char* to_string(Regime r);

}  // namespace gaussmax::covmodels

#endif  // GAUSSMAX_COVMODELS_HPP
