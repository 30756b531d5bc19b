#ifndef GAUSSMAX_RNG_HPP
#define GAUSSMAX_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace gaussmax::rng {

// Counter-based generator (Philox4x64, 10 rounds). A stream is addressed by
// (master seed, domain, replication, block); advancing is just incrementing
// the low counter word, so any substream can be opened in O(1) and draws are
// reproducible independently of scheduling.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  Philox4x64(Key key, Counter counter) : key_(key), ctr_(counter) {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = block(ctr_, key_);
      bump();
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  // uniform in [0,1), 53 bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0,1), never exactly 0 (safe under log)
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  static Counter block_counter(std::uint64_t replication, std::uint64_t block,
                               std::uint64_t domain) {
    return Counter{0, block, replication, domain};
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static Counter block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, c[0], hi0, lo0);
      mulhilo(kMul1, c[2], hi1, lo1);
      c = Counter{hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return c;
  }

  void bump() {
    if (++ctr_[0] != 0) return;
    if (++ctr_[1] != 0) return;
    if (++ctr_[2] != 0) return;
    ++ctr_[3];
  }

  Key key_;
  Counter ctr_;
  Counter buf_{};
  int pos_ = 4;
};

// Draw domains keep the modules' substreams disjoint even at equal
// (seed, replication).
enum class Domain : std::uint64_t {
  kPath = 1,
  kSharedNoise = 2,
  kCholesky = 3,
  kFgn = 4,
  kGeneric = 5,
};

inline Philox4x64 make_stream(std::uint64_t seed, Domain domain,
                              std::uint64_t replication, std::uint64_t block = 0) {
  return Philox4x64({seed, 0x47617573734D6178ULL},  // "GaussMax"
                    Philox4x64::block_counter(replication, block,
                                              static_cast<std::uint64_t>(domain)));
}

// Ziggurat sampler for the standard normal (128 strips, Marsaglia-Tsang
// constants). Tables are built once per process.
class NormalSampler {
 public:
  explicit NormalSampler(Philox4x64 gen) : gen_(gen) {}

  double next() {
    const Tables& t = tables();
    for (;;) {
      std::uint64_t bits = gen_.next_u64();
      int i = static_cast<int>(bits & 127);
      double u = static_cast<double>(static_cast<std::int64_t>(bits) >> 11) * 0x1.0p-52;
      double x = u * t.x[i];
      if (std::fabs(x) < t.x[i + 1]) return x;
      if (i == 0) return tail(u < 0.0);
      double f = t.f[i] + gen_.next_unit() * (t.f[i + 1] - t.f[i]);
      if (f < std::exp(-0.5 * x * x)) return x;
    }
  }

  void fill(std::span<double> out) {
    for (double& v : out) v = next();
  }

  Philox4x64& generator() { return gen_; }

 private:
  static constexpr double kR = 3.442619855899;
  static constexpr double kV = 9.91256303526217e-3;

  struct Tables {
    std::array<double, 129> x;
    std::array<double, 129> f;
    Tables() {
      double fr = std::exp(-0.5 * kR * kR);
      x[0] = kV / fr;
      x[1] = kR;
      f[0] = 1.0;  // unused
      f[1] = fr;
      for (int i = 2; i <= 128; ++i) {
        double fi = f[i - 1] + kV / x[i - 1];
        if (fi >= 1.0) {
          x[i] = 0.0;
          f[i] = 1.0;
        } else {
          x[i] = std::sqrt(-2.0 * std::log(fi));
          f[i] = fi;
        }
      }
      x[128] = 0.0;
      f[128] = 1.0;
    }
  };

  static const Tables& tables() {
    static const Tables t;
    return t;
  }

  double tail(bool negative) {
    double x, y;
    do {
      x = -std::log(gen_.next_unit_open()) / kR;
      y = -std::log(gen_.next_unit_open());
    } while (y + y < x * x);
    double v = kR + x;
    return negative ? -v : v;
  }

  Philox4x64 gen_;
};

}  // namespace gaussmax::rng

#endif  // GAUSSMAX_RNG_HPP
