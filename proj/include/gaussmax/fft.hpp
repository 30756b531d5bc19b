#ifndef GAUSSMAX_FFT_HPP
#define GAUSSMAX_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace gaussmax::fft {

// Forward complex DFT of fixed size, backed by FFTW. Each instance owns its
// aligned buffer, so one per worker thread is the intended usage. Plan
// creation is serialized internally (FFTW planning is not thread safe);
// execution is reentrant.
class ComplexDft {
 public:
  explicit ComplexDft(std::size_t size);
  ~ComplexDft();
  ComplexDft(ComplexDft&&) noexcept;
  ComplexDft& operator=(ComplexDft&&) noexcept;
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  std::size_t size() const { return size_; }

  // in-place transform of the owned buffer
  std::complex<double>* data() { return buf_; }
  void execute();

 private:
  std::size_t size_ = 0;
  std::complex<double>* buf_ = nullptr;
  void* plan_ = nullptr;
};

// DFT of a real even sequence: returns the (real) eigenvalue table of the
// circulant with first row `row`. Uses a real-to-complex transform plus the
// symmetry of the input.
std::vector<double> circulant_eigenvalues(const std::vector<double>& row);

}  // namespace gaussmax::fft

#endif  // GAUSSMAX_FFT_HPP
