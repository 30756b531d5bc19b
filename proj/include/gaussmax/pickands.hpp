#ifndef GAUSSMAX_PICKANDS_HPP
#define GAUSSMAX_PICKANDS_HPP

#include <cstdint>
#include <vector>

namespace gaussmax::pickands {

struct WindowEstimate {
  double lambda = 0.0;
  double mean = 0.0;      // estimate of H_alpha(lambda) = E exp(max ...)
  double ci_half = 0.0;   // 95% normal-approximation half width
  std::uint64_t clip_count = 0;  // exponents clipped at 700
};

struct PickandsEstimate {
  double alpha = 0.0;
  std::vector<WindowEstimate> windows;
  double h_hat = 0.0;    // least-squares slope of H(lambda) over the schedule
  double ci_half = 0.0;  // propagated from per-window CIs
  double grid_step = 0.0;
};

struct GridDeficiency {
  double alpha = 0.0;
  double a = 0.0;      // grid step in Pickands scale
  double delta = 0.0;  // 1 - H^grid(a) / H
  double ci_half = 0.0;
  std::uint64_t clip_count = 0;
};

// Mean of exp(max over the step-delta_t grid of sqrt(2) B_{alpha/2}(t) - t^alpha)
// over [0, lambda]. The exponent is clipped at 700 before exponentiation and
// clip events are counted (they flag a window too long for the sample size).
WindowEstimate estimate_h_lambda(double alpha, double lambda, double delta_t,
                                 std::size_t reps, std::uint64_t seed,
                                 int threads = 1, std::uint64_t rep_offset = 0);

// Fits H(lambda) ~ H_alpha * lambda + C over the schedule and reports the
// slope; the slope form cancels the O(1) window boundary term and the
// near-constant grid-discretization factor.
//
// Window lengths must stay moderate: Var exp(max) grows like e^{2 lambda^alpha},
// so windows much beyond lambda^alpha ~ 4 drown the estimate in Monte Carlo
// noise at any workable replication count.
PickandsEstimate estimate_h(double alpha, const std::vector<double>& schedule,
                            double delta_t, std::size_t reps, std::uint64_t seed,
                            int threads = 1);

// Curated defaults: {2,3,4} for alpha = 1, {0.5,1,1.5} for alpha = 2,
// {2,3,4}^{1/alpha} otherwise.
std::vector<double> default_schedule(double alpha);
double default_delta_t();
std::size_t default_reps();

// Grid deficiency delta(a) = 1 - H^grid(a)/H from paired runs: each
// realization on the fine grid (step a/16) yields both the full-grid and the
// a-grid maximum; slopes over windows {lambda/2, lambda}; CI from 20 batches.
GridDeficiency estimate_delta(double alpha, double a, double lambda,
                              std::size_t reps, std::uint64_t seed,
                              int threads = 1);

// Pickands constant of the step-a grid process: slope of the windowed
// functional with maximization restricted to the lattice {ja}. This is the
// exceedance intensity constant the discretization bound attaches to maxima
// sampled at q = a u^{-2/alpha}; the experiment engine uses it to normalize
// grid maxima. Deterministic for fixed (alpha, a): internally seeded.
double estimate_h_grid(double alpha, double a, std::size_t reps = 1'000'000,
                       int threads = 1);

}  // namespace gaussmax::pickands

#endif  // GAUSSMAX_PICKANDS_HPP
