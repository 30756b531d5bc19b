#include "gaussmax/gpsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

namespace gaussmax::gpsim {

namespace {

constexpr double kEigTolRel = 1e-8;
constexpr std::size_t kPaddingCap = std::size_t{1} << 26;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::size_t next_pow2(std::size_t v) { return std::bit_ceil(v); }

// Builds the circulant row rho_j = lag(min(j, m-j)) and its spectrum,
// doubling m until nonnegative within tolerance. lag(k) must be defined for
// k <= m/2; values beyond a table's range are constant-extended by eval_lag.
template <typename LagFn>
std::pair<std::vector<double>, double> spectrum_with_padding(LagFn&& lag,
                                                             std::size_t n,
                                                             const char* what) {
  std::size_t m = std::max<std::size_t>(next_pow2(2 * (n - 1)), 2);
  for (;;) {
    std::vector<double> row(m);
    for (std::size_t j = 0; j <= m / 2; ++j) row[j] = lag(j);
    for (std::size_t j = m / 2 + 1; j < m; ++j) row[j] = row[m - j];
    std::vector<double> eig = fft::circulant_eigenvalues(row);

    double min_eig = eig[0], max_eig = eig[0], mean = 0.0;
    for (double e : eig) {
      min_eig = std::min(min_eig, e);
      max_eig = std::max(max_eig, e);
      mean += e;
    }
    mean /= static_cast<double>(m);
    if (std::fabs(mean - row[0]) > 1e-10 * std::max(1.0, std::fabs(row[0])))
      throw EmbeddingFailure(std::string(what) + ": eigenvalue mean drifted from r(0)");

    const double tol = kEigTolRel * std::max(max_eig, 1.0);
    if (min_eig >= -tol) {
      for (double& e : eig)
        if (e < 0.0) e = 0.0;
      return {std::move(eig), min_eig};
    }
    if (m >= kPaddingCap)
      throw EmbeddingFailure(std::string(what) +
                             ": spectrum not nonnegative at the padding cap (min " +
                             std::to_string(min_eig) + ")");
    m *= 2;
  }
}

}  // namespace

GridSpec GridSpec::from_horizon(double horizon, double step) {
  require(step > 0.0, "GridSpec: step must be positive");
  require(horizon >= step, "GridSpec: horizon must cover at least two points");
  GridSpec g;
  g.horizon = horizon;
  g.step = step;
  g.n = static_cast<std::size_t>(std::floor(horizon / step * (1.0 + 1e-12))) + 1;
  return g;
}

GridSpec GridSpec::from_count(std::size_t n, double step) {
  require(step > 0.0, "GridSpec: step must be positive");
  require(n >= 2, "GridSpec: need at least two points");
  GridSpec g;
  g.horizon = static_cast<double>(n - 1) * step;
  g.step = step;
  g.n = n;
  return g;
}

Embedding Embedding::build(const covmodels::CorrelationModel& model,
                           const GridSpec& grid) {
  require(grid.n >= 2, "Embedding: grid too small");
  const double cap_lag = model.max_lag();
  auto lag = [&](std::size_t k) {
    double t = static_cast<double>(k) * grid.step;
    return model.eval(std::min(t, cap_lag));
  };
  auto [eig, min_eig] = spectrum_with_padding(lag, grid.n, "Embedding");
  return Embedding(std::move(eig), grid, min_eig);
}

Embedding Embedding::from_autocovariance(const std::vector<double>& rho,
                                         const GridSpec& grid) {
  require(!rho.empty() && grid.n >= 2 && rho.size() >= grid.n,
          "Embedding: autocovariance row shorter than grid");
  require(std::fabs(rho[0] - 1.0) <= 1e-12, "Embedding: rho(0) must be 1");
  auto lag = [&](std::size_t k) { return rho[std::min(k, rho.size() - 1)]; };
  auto [eig, min_eig] = spectrum_with_padding(lag, grid.n, "Embedding");
  return Embedding(std::move(eig), grid, min_eig);
}

void Embedding::save(const std::string& path) const {
  static_assert(std::endian::native == std::endian::little,
                "cache format is little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Embedding::save: cannot open " + path);
  out.write("GMEB", 4);
  std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  std::uint64_t m = eigenvalues_.size();
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(eigenvalues_.data()),
            static_cast<std::streamsize>(8 * m));
  if (!out) throw std::runtime_error("Embedding::save: write failed: " + path);
}

Embedding Embedding::load(const std::string& path, const GridSpec& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Embedding::load: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GMEB", 4) != 0)
    throw std::runtime_error("Embedding::load: bad magic: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("Embedding::load: unknown version");
  std::uint64_t m = 0;
  in.read(reinterpret_cast<char*>(&m), 8);
  if (!in || m < 2 * (grid.n - 1) || m > kPaddingCap)
    throw std::runtime_error("Embedding::load: order incompatible with grid");
  std::vector<double> eig(m);
  in.read(reinterpret_cast<char*>(eig.data()), static_cast<std::streamsize>(8 * m));
  if (!in) throw std::runtime_error("Embedding::load: truncated file");
  double min_eig = *std::min_element(eig.begin(), eig.end());
  return Embedding(std::move(eig), grid, min_eig);
}

std::string Embedding::cache_file(const std::string& dir,
                                  const covmodels::CorrelationModel& model,
                                  const GridSpec& grid) {
  std::uint64_t h = model.hash();
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  };
  mix(grid.n);
  std::uint64_t step_bits;
  std::memcpy(&step_bits, &grid.step, 8);
  mix(step_bits);
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.gmeb",
                static_cast<unsigned long long>(h));
  return (std::filesystem::path(dir) / name).string();
}

Embedding Embedding::build_cached(const std::string& dir,
                                  const covmodels::CorrelationModel& model,
                                  const GridSpec& grid) {
  const std::string file = cache_file(dir, model, grid);
  if (std::filesystem::exists(file)) return load(file, grid);
  Embedding e = build(model, grid);
  std::filesystem::create_directories(dir);
  e.save(file);
  return e;
}

PathSampler::PathSampler(const Embedding& embedding)
    : embedding_(&embedding), dft_(embedding.circulant_order()) {
  const auto& eig = embedding.eigenvalues();
  const double m = static_cast<double>(eig.size());
  scale_.resize(eig.size());
  for (std::size_t j = 0; j < eig.size(); ++j) scale_[j] = std::sqrt(eig[j] / m);
}

void PathSampler::sample_pair(std::uint64_t seed, std::uint64_t pair,
                              std::vector<double>& even, std::vector<double>& odd,
                              std::uint64_t block) {
  const std::size_t m = dft_.size();
  const std::size_t n = embedding_->grid().n;
  rng::NormalSampler normals(rng::make_stream(seed, rng::Domain::kPath, pair, block));
  std::complex<double>* buf = dft_.data();
  for (std::size_t j = 0; j < m; ++j) {
    const double re = normals.next();
    const double im = normals.next();
    buf[j] = {re * scale_[j], im * scale_[j]};
  }
  dft_.execute();
  even.resize(n);
  odd.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    even[k] = buf[k].real();
    odd[k] = buf[k].imag();
  }
}

SamplePath PathSampler::sample(RngStream stream) {
  const std::uint64_t pair = stream.replication >> 1;
  if (!has_cache_ || cached_seed_ != stream.master_seed || cached_pair_ != pair) {
    sample_pair(stream.master_seed, pair, cache_even_, cache_odd_);
    cached_seed_ = stream.master_seed;
    cached_pair_ = pair;
    has_cache_ = true;
  }
  SamplePath p;
  p.values = (stream.replication & 1) ? cache_odd_ : cache_even_;
  p.grid = embedding_->grid();
  p.stream = stream;
  return p;
}

CholeskySampler::CholeskySampler(const covmodels::CorrelationModel& model,
                                 const GridSpec& grid)
    : grid_(grid) {
  require(grid.n >= 2 && grid.n <= 2048, "CholeskySampler: n must lie in [2, 2048]");
  const std::size_t n = grid.n;
  chol_.assign(n * n, 0.0);
  auto a = [&](std::size_t i, std::size_t j) -> double& { return chol_[i * n + j]; };
  const double cap_lag = model.max_lag();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      a(i, j) = model.eval(std::min(static_cast<double>(i - j) * grid.step, cap_lag));

  const double tol = 1e-10 * static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d < -tol)
      throw FactorizationFailure("cholesky_path: covariance matrix is not PSD");
    if (d <= tol) {
      // semidefinite direction: zero pivot column
      a(j, j) = 0.0;
      for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0.0;
      continue;
    }
    const double root = std::sqrt(d);
    a(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / root;
    }
  }
}

SamplePath CholeskySampler::sample(RngStream stream) const {
  const std::size_t n = grid_.n;
  rng::NormalSampler normals(
      rng::make_stream(stream.master_seed, rng::Domain::kCholesky, stream.replication));
  std::vector<double> z(n);
  normals.fill(z);
  SamplePath p;
  p.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = &chol_[i * n];
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    p.values[i] = s;
  }
  p.grid = grid_;
  p.stream = stream;
  return p;
}

SamplePath cholesky_path(const covmodels::CorrelationModel& model,
                         const GridSpec& grid, RngStream stream) {
  return CholeskySampler(model, grid).sample(stream);
}

FbmSampler::FbmSampler(double hurst, const GridSpec& grid)
    : hurst_(hurst), grid_(grid) {
  require(hurst > 0.0 && hurst <= 1.0, "sample_fbm: H must lie in (0,1]");
  require(grid.n >= 2, "sample_fbm: grid too small");
  if (hurst == 1.0 || hurst == 0.5) {
    inc_scale_ = std::pow(grid.step, hurst);
    return;
  }
  const std::size_t inc = grid.n - 1;
  const std::size_t want = std::max<std::size_t>(next_pow2(2 * (inc - 1)) / 2 + 1, inc);
  std::vector<double> rho(want);
  const double h2 = 2.0 * hurst;
  for (std::size_t k = 0; k < want; ++k) {
    const double kk = static_cast<double>(k);
    rho[k] = 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
                    std::pow(std::fabs(kk - 1.0), h2));
  }
  GridSpec inc_grid = GridSpec::from_count(std::max<std::size_t>(inc, 2), grid.step);
  embedding_ = Embedding::from_autocovariance(rho, inc_grid);
  paths_ = std::make_unique<PathSampler>(*embedding_);
  inc_scale_ = std::pow(grid.step, hurst);
}

SamplePath FbmSampler::sample(RngStream stream) {
  SamplePath p;
  p.grid = grid_;
  p.stream = stream;
  p.values.assign(grid_.n, 0.0);
  if (hurst_ == 1.0) {
    rng::NormalSampler normals(
        rng::make_stream(stream.master_seed, rng::Domain::kFgn, stream.replication));
    const double z = normals.next();
    for (std::size_t k = 0; k < grid_.n; ++k) p.values[k] = grid_.time(k) * z;
    return p;
  }
  if (hurst_ == 0.5) {
    rng::NormalSampler normals(
        rng::make_stream(stream.master_seed, rng::Domain::kFgn, stream.replication));
    double acc = 0.0;
    for (std::size_t k = 1; k < grid_.n; ++k) {
      acc += inc_scale_ * normals.next();
      p.values[k] = acc;
    }
    return p;
  }
  SamplePath inc = paths_->sample(stream);
  double acc = 0.0;
  for (std::size_t k = 1; k < grid_.n; ++k) {
    acc += inc_scale_ * inc.values[k - 1];
    p.values[k] = acc;
  }
  return p;
}

SamplePath sample_fbm(double hurst, const GridSpec& grid, RngStream stream) {
  return FbmSampler(hurst, grid).sample(stream);
}

ComparisonSampler::ComparisonSampler(const covmodels::CorrelationModel& model,
                                     const GridSpec& grid, double eps, double r)
    : grid_(grid), eps_(eps) {
  constexpr double kE = 2.718281828459045235360287;
  require(grid.horizon > kE, "comparison path: T must exceed e");
  require(eps > 0.0 && eps < 1.0, "comparison path: eps must lie in (0,1)");
  require(r >= 0.0, "comparison path: r must be nonnegative");
  rho_ = r / std::log(grid.horizon);
  require(rho_ >= 0.0 && rho_ < 1.0, "comparison path: rho(T) must lie in [0,1)");

  const auto whole = static_cast<std::size_t>(std::floor(grid.horizon));
  n_blocks_ = whole;
  mask_.assign(grid.n, 1);
  block_of_.assign(grid.n, ~std::uint32_t{0});
  std::size_t max_len = 0, cur_len = 0;
  std::uint32_t cur_block = ~std::uint32_t{0};
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double t = grid.time(k);
    const double unit = std::floor(t);
    if (unit >= static_cast<double>(whole)) break;  // trailing interval J
    if (t - unit < eps) continue;                   // gap I_j^eps
    mask_[k] = 0;
    block_of_[k] = static_cast<std::uint32_t>(unit);
    if (block_of_[k] != cur_block) {
      cur_block = block_of_[k];
      cur_len = 0;
    }
    max_len = std::max(max_len, ++cur_len);
  }
  require(max_len >= 2, "comparison path: blocks too short for the grid step");
  block_embedding_ = Embedding::build(model, GridSpec::from_count(max_len, grid.step));
  block_paths_ = std::make_unique<PathSampler>(*block_embedding_);
}

SamplePath ComparisonSampler::sample(RngStream stream) {
  SamplePath p;
  p.grid = grid_;
  p.stream = stream;
  p.gap_mask = mask_;
  p.values.assign(grid_.n, 0.0);

  rng::NormalSampler shared(rng::make_stream(stream.master_seed,
                                             rng::Domain::kSharedNoise,
                                             stream.replication));
  const double w = shared.next();
  const double a = std::sqrt(1.0 - rho_);
  const double b = std::sqrt(rho_);

  std::vector<double> even, odd;
  std::uint32_t cur_block = ~std::uint32_t{0};
  std::size_t offset = 0;
  for (std::size_t k = 0; k < grid_.n; ++k) {
    if (mask_[k]) continue;
    if (block_of_[k] != cur_block) {
      cur_block = block_of_[k];
      offset = 0;
      block_paths_->sample_pair(stream.master_seed, stream.replication, even, odd,
                                /*block=*/cur_block + 1);
    }
    p.values[k] = a * even[offset++] + b * w;
  }
  return p;
}

SamplePath sample_comparison_path(const covmodels::CorrelationModel& model,
                                  const GridSpec& grid, double eps, double r,
                                  RngStream stream) {
  return ComparisonSampler(model, grid, eps, r).sample(stream);
}

double path_max(const SamplePath& path, bool absolute,
                const std::vector<std::uint8_t>* extra_mask) {
  require(!path.values.empty(), "path_max: empty path");
  const auto* gap = path.gap_mask.empty() ? nullptr : &path.gap_mask;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    if (gap && (*gap)[k]) continue;
    if (extra_mask && (*extra_mask)[k]) continue;
    const double v = absolute ? std::fabs(path.values[k]) : path.values[k];
    best = std::max(best, v);
    any = true;
  }
  require(any, "path_max: all points masked");
  return best;
}

}  // namespace gaussmax::gpsim
