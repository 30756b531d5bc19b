#include "gaussmax/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace gaussmax::fft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ComplexDft::ComplexDft(std::size_t size) : size_(size) {
  if (size == 0) throw std::invalid_argument("ComplexDft: size must be positive");
  buf_ = reinterpret_cast<std::complex<double>*>(
      fftw_malloc(sizeof(fftw_complex) * size));
  if (!buf_) throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(size),
                           reinterpret_cast<fftw_complex*>(buf_),
                           reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD,
                           FFTW_ESTIMATE);
  if (!plan_) {
    fftw_free(buf_);
    throw std::runtime_error("ComplexDft: FFTW planning failed");
  }
}

ComplexDft::~ComplexDft() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  if (buf_) fftw_free(buf_);
}

ComplexDft::ComplexDft(ComplexDft&& other) noexcept
    : size_(other.size_), buf_(other.buf_), plan_(other.plan_) {
  other.size_ = 0;
  other.buf_ = nullptr;
  other.plan_ = nullptr;
}

ComplexDft& ComplexDft::operator=(ComplexDft&& other) noexcept {
  if (this != &other) {
    std::swap(size_, other.size_);
    std::swap(buf_, other.buf_);
    std::swap(plan_, other.plan_);
  }
  return *this;
}

void ComplexDft::execute() { fftw_execute(static_cast<fftw_plan>(plan_)); }

std::vector<double> circulant_eigenvalues(const std::vector<double>& row) {
  const std::size_t m = row.size();
  if (m == 0) throw std::invalid_argument("circulant_eigenvalues: empty row");
  double* in = static_cast<double*>(fftw_malloc(sizeof(double) * m));
  fftw_complex* out = static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * (m / 2 + 1)));
  if (!in || !out) {
    fftw_free(in);
    fftw_free(out);
    throw std::bad_alloc();
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < m; ++i) in[i] = row[i];
  fftw_execute(plan);
  std::vector<double> eig(m);
  for (std::size_t k = 0; k <= m / 2; ++k) eig[k] = out[k][0];
  for (std::size_t k = m / 2 + 1; k < m; ++k) eig[k] = eig[m - k];
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return eig;
}

}  // namespace gaussmax::fft
