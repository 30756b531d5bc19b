#ifndef GAUSSMAX_GPSIM_HPP
#define GAUSSMAX_GPSIM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaussmax/covmodels.hpp"
#include "gaussmax/fft.hpp"
#include "gaussmax/rng.hpp"

namespace gaussmax::gpsim {

struct EmbeddingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FactorizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform grid 0, step, ..., (n-1)*step covering [0, horizon].
struct GridSpec {
  double horizon = 0.0;
  double step = 0.0;
  std::size_t n = 0;

  static GridSpec from_horizon(double horizon, double step);
  static GridSpec from_count(std::size_t n, double step);
  double time(std::size_t k) const { return static_cast<double>(k) * step; }
};

struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;
};

struct SamplePath {
  std::vector<double> values;
  GridSpec grid;
  RngStream stream;
  // nonempty: gap_mask[k] != 0 marks grid points excluded from maxima
  std::vector<std::uint8_t> gap_mask;
};

// Precomputed circulant eigenvalue table for exact stationary synthesis.
// The first n lags of the circulant row equal r(k*step) exactly; the order m
// is a power of two >= 2(n-1), doubled until the spectrum is nonnegative
// within tolerance (relative 1e-8), capped at 2^26. Small negative
// eigenvalues inside the tolerance are clamped to zero.
class Embedding {
 public:
  static Embedding build(const covmodels::CorrelationModel& model, const GridSpec& grid);

  // Embedding of an arbitrary unit-variance autocovariance sequence
  // rho(k), k = 0..len-1 (len >= grid.n); used for fractional Gaussian noise.
  static Embedding from_autocovariance(const std::vector<double>& rho,
                                       const GridSpec& grid);

  std::size_t circulant_order() const { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const GridSpec& grid() const { return grid_; }
  double min_eigenvalue() const { return min_eig_; }

  // binary cache: magic "GMEB", version u32, m u64, m little-endian f64
  void save(const std::string& path) const;
  static Embedding load(const std::string& path, const GridSpec& grid);
  static std::string cache_file(const std::string& dir,
                                const covmodels::CorrelationModel& model,
                                const GridSpec& grid);
  static Embedding build_cached(const std::string& dir,
                                const covmodels::CorrelationModel& model,
                                const GridSpec& grid);

 private:
  Embedding(std::vector<double> eig, GridSpec grid, double min_eig)
      : eigenvalues_(std::move(eig)), grid_(grid), min_eig_(min_eig) {}
  std::vector<double> eigenvalues_;
  GridSpec grid_;
  double min_eig_ = 0.0;
};

// FFT worker over one embedding. One complex transform yields two
// independent paths (replications 2k and 2k+1); sample() caches the pair.
// Use one sampler per thread; the embedding itself is shareable.
class PathSampler {
 public:
  explicit PathSampler(const Embedding& embedding);

  SamplePath sample(RngStream stream);

  // low-level pair access: replications 2*pair and 2*pair+1
  void sample_pair(std::uint64_t seed, std::uint64_t pair,
                   std::vector<double>& even, std::vector<double>& odd,
                   std::uint64_t block = 0);

 private:
  const Embedding* embedding_;
  fft::ComplexDft dft_;
  std::vector<double> scale_;  // sqrt(eig_j / m)
  std::uint64_t cached_seed_ = 0;
  std::uint64_t cached_pair_ = 0;
  bool has_cache_ = false;
  std::vector<double> cache_even_, cache_odd_;
};

// Dense-factorization oracle for small grids (n <= 2048).
class CholeskySampler {
 public:
  CholeskySampler(const covmodels::CorrelationModel& model, const GridSpec& grid);
  SamplePath sample(RngStream stream) const;

 private:
  GridSpec grid_;
  std::vector<double> chol_;  // row-major lower factor
};

SamplePath cholesky_path(const covmodels::CorrelationModel& model,
                         const GridSpec& grid, RngStream stream);

// Fractional Brownian motion with E B^2(t) = t^{2H}, B(0) = 0, by cumulated
// exact fractional Gaussian noise. H = 1/2 uses independent increments,
// H = 1 the degenerate line t*Z.
class FbmSampler {
 public:
  FbmSampler(double hurst, const GridSpec& grid);
  SamplePath sample(RngStream stream);

 private:
  double hurst_;
  GridSpec grid_;
  double inc_scale_ = 0.0;
  std::optional<Embedding> embedding_;
  std::unique_ptr<PathSampler> paths_;
};

SamplePath sample_fbm(double hurst, const GridSpec& grid, RngStream stream);

// Comparison process of the block construction: unit intervals split into a
// gap of length eps and a block of length 1-eps; eta uses an independent
// process copy per block and W is one shared standard normal:
//   xi = (1-rho)^{1/2} eta + rho^{1/2} W,  rho = r / log T.
// Gap points (and the trailing partial interval) are masked.
class ComparisonSampler {
 public:
  ComparisonSampler(const covmodels::CorrelationModel& model, const GridSpec& grid,
                    double eps, double r);
  SamplePath sample(RngStream stream);
  double rho() const { return rho_; }

 private:
  GridSpec grid_;
  double eps_;
  double rho_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint32_t> block_of_;   // block index per grid point (masked: ~0)
  std::size_t n_blocks_ = 0;
  std::optional<Embedding> block_embedding_;
  std::unique_ptr<PathSampler> block_paths_;
};

SamplePath sample_comparison_path(const covmodels::CorrelationModel& model,
                                  const GridSpec& grid, double eps, double r,
                                  RngStream stream);

double path_max(const SamplePath& path, bool absolute,
                const std::vector<std::uint8_t>* extra_mask = nullptr);

}  // namespace gaussmax::gpsim

#endif  // GAUSSMAX_GPSIM_HPP
