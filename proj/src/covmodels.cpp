#include "gaussmax/covmodels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gaussmax::covmodels {

namespace {

constexpr double kE = 2.718281828459045235360287;
const double kE4 = std::exp(4.0);

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

CorrelationModel CorrelationModel::weak(double alpha) {
  require(alpha > 0.0 && alpha <= 2.0, "weak family: alpha must lie in (0,2]");
  CorrelationModel m;
  m.family_ = Family::kWeak;
  m.alpha_ = alpha;
  return m;
}

CorrelationModel CorrelationModel::b1(double alpha, double r) {
  require(alpha > 0.0 && alpha <= 1.0,
          "b1 family: alpha must lie in (0,1] (Polya construction)");
  require(r > 0.0 && r < 1.0, "b1 family: r must lie in (0,1)");
  CorrelationModel m;
  m.family_ = Family::kB1;
  m.alpha_ = alpha;
  m.r_ = r;
  return m;
}

CorrelationModel CorrelationModel::b2(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0,
          "b2 family: alpha must lie in (0,1] (Polya construction)");
  CorrelationModel m;
  m.family_ = Family::kB2;
  m.alpha_ = alpha;
  return m;
}

CorrelationModel CorrelationModel::from_table(std::vector<double> values,
                                              double lag_step, double alpha) {
  require(values.size() >= 2, "table model: need at least two lags");
  require(lag_step > 0.0, "table model: lag step must be positive");
  require(std::fabs(values[0] - 1.0) <= 1e-12, "table model: value at lag 0 must be 1");
  for (double v : values)
    require(std::isfinite(v) && std::fabs(v) <= 1.0 + 1e-12,
            "table model: |r| must not exceed 1");
  CorrelationModel m;
  m.family_ = Family::kUserTable;
  m.alpha_ = alpha;
  m.lag_step_ = lag_step;
  m.table_ = std::move(values);
  return m;
}

CorrelationModel CorrelationModel::load_table_csv(const std::string& path,
                                                  double alpha) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty table: " + path);
  if (line != "lag,value" && line != "lag,value\r")
    throw std::runtime_error("table header must be 'lag,value': " + path);
  std::vector<double> lags, vals;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::runtime_error("malformed table row: " + line);
    lags.push_back(std::stod(a));
    vals.push_back(std::stod(b));
  }
  if (lags.size() < 2) throw std::runtime_error("table needs at least two rows");
  const double step = lags[1] - lags[0];
  require(step > 0.0, "table lags must increase");
  for (std::size_t k = 0; k < lags.size(); ++k)
    if (std::fabs(lags[k] - static_cast<double>(k) * step) > 1e-9 * (1.0 + lags[k]))
      throw std::runtime_error("table lags must be uniformly spaced from 0");
  return from_table(std::move(vals), step, alpha);
}

double CorrelationModel::eval(double t) const {
  require(t >= 0.0, "eval: t must be nonnegative");
  switch (family_) {
    case Family::kWeak:
      return std::exp(-std::pow(t, alpha_));
    case Family::kB1:
      return std::max(1.0 - std::pow(t, alpha_), r_ / std::log(kE + t));
    case Family::kB2:
      return std::max(1.0 - std::pow(t, alpha_), 1.0 / std::sqrt(std::log(kE4 + t)));
    case Family::kUserTable: {
      const double pos = t / lag_step_;
      const auto last = static_cast<double>(table_.size() - 1);
      if (pos > last + 1e-9)
        throw std::out_of_range("eval: lag beyond user table range");
      if (pos >= last) return table_.back();
      const auto k = static_cast<std::size_t>(pos);
      const double w = pos - static_cast<double>(k);
      return (1.0 - w) * table_[k] + w * table_[k + 1];
    }
  }
  return 0.0;  // unreachable
}

double CorrelationModel::max_lag() const {
  if (family_ == Family::kUserTable)
    return lag_step_ * static_cast<double>(table_.size() - 1);
  return std::numeric_limits<double>::infinity();
}

std::uint64_t CorrelationModel::hash() const {
  // FNV-1a over the identifying parameters
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(family_));
  auto bits = [](double x) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    __builtin_memcpy(&u, &x, 8);
    return u;
  };
  mix(bits(alpha_));
  mix(bits(r_));
  mix(bits(lag_step_));
  for (double v : table_) mix(bits(v));
  return h;
}

std::string CorrelationModel::name() const {
  switch (family_) {
    case Family::kWeak:
      return "weak(alpha=" + std::to_string(alpha_) + ")";
    case Family::kB1:
      return "b1(alpha=" + std::to_string(alpha_) + ",r=" + std::to_string(r_) + ")";
    case Family::kB2:
      return "b2(alpha=" + std::to_string(alpha_) + ")";
    case Family::kUserTable:
      return "table(n=" + std::to_string(table_.size()) + ")";
  }
  return "?";
}

double residual_correlation(const CorrelationModel& model, double t, double T) {
  require(t >= 0.0 && t <= T, "residual_correlation: need 0 <= t <= T");
  const double rT = model.eval(T);
  require(rT < 1.0, "residual_correlation: r(T) must be below 1");
  return (model.eval(t) - rT) / (1.0 - rT);
}

RegimeReport regime_diagnostics(const CorrelationModel& model, double t_max,
                                int n_probes) {
  require(t_max > 10.0, "regime_diagnostics: t_max must exceed 10");
  require(n_probes >= 3, "regime_diagnostics: need at least 3 probes");
  const double t_lo = 10.0;
  const double cap = std::min(t_max, model.max_lag());
  RegimeReport rep;
  rep.probe_values.reserve(static_cast<std::size_t>(n_probes));
  const double ratio = std::pow(cap / t_lo, 1.0 / (n_probes - 1));
  for (int i = 0; i < n_probes; ++i) {
    const double t = t_lo * std::pow(ratio, i);
    rep.probe_values.emplace_back(t, model.eval(t) * std::log(t));
  }
  const auto n = rep.probe_values.size();
  const double v0 = rep.probe_values[n - 3].second;
  const double v1 = rep.probe_values[n - 2].second;
  const double v2 = rep.probe_values[n - 1].second;
  rep.limit_estimate = (v0 + v1 + v2) / 3.0;

  if (std::fabs(rep.limit_estimate) < 0.01) {
    rep.classification = Regime::kBerman;
  } else if (rep.limit_estimate > 3.0 && v0 < v1 && v1 < v2) {
    rep.classification = Regime::kStrongInfinite;
  } else {
    const double lo = std::min({v0, v1, v2});
    const double hi = std::max({v0, v1, v2});
    if (rep.limit_estimate > 0.0 && (hi - lo) < 0.10 * rep.limit_estimate)
      rep.classification = Regime::kStrongFinite;
    else
      rep.classification = Regime::kUndetermined;
  }
  return rep;
}

PolyaReport validate_polya(const CorrelationModel& model, double grid_step,
                           double t_max) {
  require(grid_step > 0.0, "validate_polya: grid step must be positive");
  constexpr double kConvexTol = -1e-10;
  PolyaReport rep;
  const double cap = std::min(t_max, model.max_lag());
  const auto n = static_cast<std::size_t>(std::floor(cap / grid_step)) + 1;

  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k)
    r[k] = model.eval(static_cast<double>(k) * grid_step);

  auto fail = [&](PolyaReport::Violation why, std::size_t k) {
    rep.pass = false;
    rep.first_violation = why;
    rep.violating_lag = static_cast<double>(k) * grid_step;
    rep.r_at_tmax = r.back();
    return rep;
  };

  if (std::fabs(r[0] - 1.0) > 1e-12) return fail(PolyaReport::Violation::kValueRange, 0);
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(r[k]) || std::fabs(r[k]) > 1.0 + 1e-12)
      return fail(PolyaReport::Violation::kValueRange, k);
  for (std::size_t k = 1; k < n; ++k)
    if (r[k] > r[k - 1] + 1e-12) return fail(PolyaReport::Violation::kNotNonincreasing, k);
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (r[k + 1] - 2.0 * r[k] + r[k - 1] < kConvexTol)
      return fail(PolyaReport::Violation::kNotConvex, k);
  if (r.back() > 0.25) return fail(PolyaReport::Violation::kLimitNotZero, n - 1);

  rep.pass = true;
  rep.first_violation = PolyaReport::Violation::kNone;
  rep.r_at_tmax = r.back();
  return rep;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kBerman:
      return "berman";
    case Regime::kStrongFinite:
      return "strong-finite";
    case Regime::kStrongInfinite:
      return "strong-infinite";
    case Regime::kUndetermined:
      return "undetermined";
  }
  return "?";
}

}  // namespace gaussmax::covmodels
