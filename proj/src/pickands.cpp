#include "gaussmax/pickands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "gaussmax/gpsim.hpp"

namespace gaussmax::pickands {

namespace {

constexpr double kExpClip = 700.0;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct WorkerMoments {
  KahanSum sum, sum_sq;
  std::uint64_t clips = 0;
};

// One worker's share of replications, accumulated in replication order.
template <typename PerRep>
void run_workers(std::size_t reps, int threads, PerRep&& body) {
  const int nw = std::max(1, threads);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    const std::size_t lo = reps * w / nw;
    const std::size_t hi = reps * (w + 1) / nw;
    pool.emplace_back([&body, w, lo, hi] { body(w, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

WindowEstimate estimate_h_lambda(double alpha, double lambda, double delta_t,
                                 std::size_t reps, std::uint64_t seed, int threads,
                                 std::uint64_t rep_offset) {
  require(alpha > 0.0 && alpha <= 2.0, "estimate_h_lambda: alpha must lie in (0,2]");
  require(lambda > 0.0, "estimate_h_lambda: lambda must be positive");
  require(delta_t > 0.0 && delta_t <= lambda / 32.0,
          "estimate_h_lambda: need delta_t <= lambda/32");
  require(reps >= 1000, "estimate_h_lambda: need at least 1e3 replications");

  const auto grid = gpsim::GridSpec::from_horizon(lambda, delta_t);
  const int nw = std::max(1, threads);
  std::vector<WorkerMoments> acc(nw);

  run_workers(reps, threads, [&](int w, std::size_t lo, std::size_t hi) {
    gpsim::FbmSampler fbm(alpha / 2.0, grid);
    std::vector<double> drift(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
      drift[k] = std::pow(grid.time(k), alpha);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t i = lo; i < hi; ++i) {
      gpsim::SamplePath path = fbm.sample({seed, rep_offset + i});
      double m = 0.0;  // t = 0 term
      for (std::size_t k = 1; k < grid.n; ++k)
        m = std::max(m, sqrt2 * path.values[k] - drift[k]);
      if (m > kExpClip) {
        m = kExpClip;
        ++acc[w].clips;
      }
      const double e = std::exp(m);
      acc[w].sum.add(e);
      acc[w].sum_sq.add(e * e);
    }
  });

  KahanSum total, total_sq;
  std::uint64_t clips = 0;
  for (const auto& a : acc) {
    total.add(a.sum.sum);
    total_sq.add(a.sum_sq.sum);
    clips += a.clips;
  }
  const double n = static_cast<double>(reps);
  const double mean = total.sum / n;
  const double var = std::max(total_sq.sum / n - mean * mean, 0.0);
  WindowEstimate est;
  est.lambda = lambda;
  est.mean = mean;
  est.ci_half = 1.96 * std::sqrt(var / n);
  est.clip_count = clips;
  return est;
}

PickandsEstimate estimate_h(double alpha, const std::vector<double>& schedule,
                            double delta_t, std::size_t reps, std::uint64_t seed,
                            int threads) {
  require(schedule.size() >= 3, "estimate_h: need at least 3 windows");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    require(schedule[i] > schedule[i - 1], "estimate_h: schedule must increase");

  PickandsEstimate est;
  est.alpha = alpha;
  est.grid_step = delta_t;
  est.windows.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i)
    est.windows.push_back(estimate_h_lambda(alpha, schedule[i], delta_t, reps, seed,
                                            threads, i * reps));

  // ordinary least squares slope; CI by propagating the (independent)
  // per-window CIs through the slope coefficients
  const auto k = static_cast<double>(schedule.size());
  double xbar = 0.0;
  for (double l : schedule) xbar += l;
  xbar /= k;
  double sxx = 0.0;
  for (double l : schedule) sxx += (l - xbar) * (l - xbar);
  double slope = 0.0, var = 0.0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double c = (schedule[i] - xbar) / sxx;
    slope += c * est.windows[i].mean;
    var += c * c * est.windows[i].ci_half * est.windows[i].ci_half;
  }
  est.h_hat = slope;
  est.ci_half = std::sqrt(var);
  return est;
}

std::vector<double> default_schedule(double alpha) {
  if (alpha == 1.0) return {2.0, 3.0, 4.0};
  if (alpha == 2.0) return {0.5, 1.0, 1.5};
  const double inv = 1.0 / alpha;
  return {std::pow(2.0, inv), std::pow(3.0, inv), std::pow(4.0, inv)};
}

double default_delta_t() { return 1.0 / 256.0; }

std::size_t default_reps() { return 2'000'000; }

double estimate_h_grid(double alpha, double a, std::size_t reps, int threads) {
  require(a > 0.0, "estimate_h_grid: a must be positive");
  // windows: multiples of a close to the curated schedule
  std::vector<double> schedule;
  for (double l : default_schedule(alpha)) {
    double snapped = std::max(1.0, std::round(l / a)) * a;
    if (schedule.empty() || snapped > schedule.back() + 0.5 * a)
      schedule.push_back(snapped);
  }
  while (schedule.size() < 3)
    schedule.push_back(schedule.back() + std::max(a, schedule[0]));

  constexpr std::uint64_t kInternalSeed = 0xA11CE5EEDULL;
  const auto grid = gpsim::GridSpec::from_horizon(schedule.back(), a);
  const int nw = std::max(1, threads);

  // per-window prefix maxima from one path per replication (windows paired)
  std::vector<std::size_t> cut(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i)
    cut[i] = static_cast<std::size_t>(std::floor(schedule[i] / a * (1.0 + 1e-12)));
  std::vector<std::vector<KahanSum>> acc(nw, std::vector<KahanSum>(schedule.size()));

  run_workers(reps, threads, [&](int w, std::size_t lo, std::size_t hi) {
    gpsim::FbmSampler fbm(alpha / 2.0, grid);
    std::vector<double> drift(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
      drift[k] = std::pow(grid.time(k), alpha);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t i = lo; i < hi; ++i) {
      gpsim::SamplePath path = fbm.sample({kInternalSeed, i});
      double m = 0.0;
      std::size_t next = 0;
      for (std::size_t k = 1; k < grid.n; ++k) {
        m = std::max(m, sqrt2 * path.values[k] - drift[k]);
        while (next < cut.size() && k == cut[next]) {
          acc[w][next].add(std::exp(std::min(m, kExpClip)));
          ++next;
        }
      }
      while (next < cut.size()) {
        acc[w][next].add(std::exp(std::min(m, kExpClip)));
        ++next;
      }
    }
  });

  std::vector<double> means(schedule.size(), 0.0);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    KahanSum s;
    for (int w = 0; w < nw; ++w) s.add(acc[w][i].sum);
    means[i] = s.sum / static_cast<double>(reps);
  }
  double xbar = 0.0;
  for (double l : schedule) xbar += l;
  xbar /= static_cast<double>(schedule.size());
  double sxx = 0.0, slope = 0.0;
  for (double l : schedule) sxx += (l - xbar) * (l - xbar);
  for (std::size_t i = 0; i < schedule.size(); ++i)
    slope += (schedule[i] - xbar) / sxx * means[i];
  if (!(slope > 0.0))
    throw std::runtime_error("estimate_h_grid: nonpositive slope estimate");
  return slope;
}

GridDeficiency estimate_delta(double alpha, double a, double lambda,
                              std::size_t reps, std::uint64_t seed, int threads) {
  require(a > 0.0, "estimate_delta: a must be positive");
  require(lambda >= 2.0 * a, "estimate_delta: need lambda >> a (at least 2a)");
  require(reps >= 1000, "estimate_delta: need at least 1e3 replications");

  constexpr std::size_t kStride = 16;
  const double dt = a / static_cast<double>(kStride);
  const auto grid = gpsim::GridSpec::from_horizon(lambda, dt);
  const std::size_t half = (grid.n - 1) / 2;  // window lambda/2 prefix

  constexpr std::size_t kBatches = 20;
  struct Batch {
    KahanSum full_half, full_whole, grid_half, grid_whole;
    std::uint64_t count = 0;
  };
  const int nw = std::max(1, threads);
  std::vector<std::vector<Batch>> acc(nw, std::vector<Batch>(kBatches));
  std::vector<std::uint64_t> clips(nw, 0);

  run_workers(reps, threads, [&](int w, std::size_t lo, std::size_t hi) {
    gpsim::FbmSampler fbm(alpha / 2.0, grid);
    std::vector<double> drift(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
      drift[k] = std::pow(grid.time(k), alpha);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t i = lo; i < hi; ++i) {
      gpsim::SamplePath path = fbm.sample({seed, i});
      double fh = 0.0, fw = 0.0, gh = 0.0, gw = 0.0;
      for (std::size_t k = 1; k < grid.n; ++k) {
        const double v = sqrt2 * path.values[k] - drift[k];
        fw = std::max(fw, v);
        if (k <= half) fh = std::max(fh, v);
        if (k % kStride == 0) {
          gw = std::max(gw, v);
          if (k <= half) gh = std::max(gh, v);
        }
      }
      auto clip = [&](double& m) {
        if (m > kExpClip) {
          m = kExpClip;
          ++clips[w];
        }
      };
      clip(fh);
      clip(fw);
      clip(gh);
      clip(gw);
      Batch& b = acc[w][i % kBatches];
      b.full_half.add(std::exp(fh));
      b.full_whole.add(std::exp(fw));
      b.grid_half.add(std::exp(gh));
      b.grid_whole.add(std::exp(gw));
      ++b.count;
    }
  });

  // merge worker batches (replication order), then two-point slopes per batch
  const double span = grid.time(grid.n - 1) - grid.time(half);
  std::vector<double> deltas;
  deltas.reserve(kBatches);
  KahanSum fh_all, fw_all, gh_all, gw_all;
  double count_all = 0.0;
  for (std::size_t bi = 0; bi < kBatches; ++bi) {
    KahanSum fh, fw, gh, gw;
    double cnt = 0.0;
    for (int w = 0; w < nw; ++w) {
      fh.add(acc[w][bi].full_half.sum);
      fw.add(acc[w][bi].full_whole.sum);
      gh.add(acc[w][bi].grid_half.sum);
      gw.add(acc[w][bi].grid_whole.sum);
      cnt += static_cast<double>(acc[w][bi].count);
    }
    if (cnt == 0.0) continue;
    const double slope_full = (fw.sum - fh.sum) / cnt / span;
    const double slope_grid = (gw.sum - gh.sum) / cnt / span;
    if (slope_full > 0.0) deltas.push_back(1.0 - slope_grid / slope_full);
    fh_all.add(fh.sum);
    fw_all.add(fw.sum);
    gh_all.add(gh.sum);
    gw_all.add(gw.sum);
    count_all += cnt;
  }

  GridDeficiency d;
  d.alpha = alpha;
  d.a = a;
  const double slope_full = (fw_all.sum - fh_all.sum) / count_all / span;
  const double slope_grid = (gw_all.sum - gh_all.sum) / count_all / span;
  d.delta = 1.0 - slope_grid / slope_full;
  double mean = 0.0;
  for (double v : deltas) mean += v;
  mean /= static_cast<double>(deltas.size());
  double var = 0.0;
  for (double v : deltas) var += (v - mean) * (v - mean);
  var /= static_cast<double>(deltas.size() - 1);
  d.ci_half = 1.96 * std::sqrt(var / static_cast<double>(deltas.size()));
  for (auto c : clips) d.clip_count += c;
  return d;
}

}  // namespace gaussmax::pickands
