#include "cmpw/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "cmpw/errors.hpp"

namespace cmpw {

namespace {

// FFTW plan creation is not thread safe; execution via the _dft entry point
// on caller-owned buffers is. Plans are cached per (size, direction).
class PlanCache {
 public:
  fftw_plan get(int n, bool forward) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, forward);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> probe(static_cast<size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    fftw_plan p =
        fftw_plan_dft_1d(n, buf, buf, forward ? FFTW_FORWARD : FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, Err::ConfigInvalid, "fftw plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft(CVec& data, bool forward) {
  const int n = static_cast<int>(data.size());
  require(n > 0, Err::LengthMismatch, "fft of empty vector");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(n, forward), buf, buf);
}

CVec spectrum(const PeriodicGrid& g, const Field& u) {
  require(static_cast<int>(u.size()) == g.n, Err::LengthMismatch,
          "field length != grid size");
  CVec c = u.cast<std::complex<double>>();
  fft(c, true);
  c *= g.dx / std::sqrt(g.L);
  return c;
}

Field from_spectrum(const PeriodicGrid& g, const CVec& c) {
  require(static_cast<int>(c.size()) == g.n, Err::LengthMismatch,
          "coefficient length != grid size");
  CVec tmp = c;
  fft(tmp, false);
  return tmp.real() / std::sqrt(g.L);
}

Eigen::VectorXd even_spectrum(const PeriodicGrid& g, const Field& u) {
  CVec c = spectrum(g, u);
  Eigen::VectorXd out(g.n);
  out[0] = c[0].real();
  for (int m = 1; m < g.n; ++m)
    out[m] = 0.5 * (c[m].real() + c[g.n - m].real());
  return out;
}

Field from_even_spectrum(const PeriodicGrid& g, const Eigen::VectorXd& c) {
  require(static_cast<int>(c.size()) == g.n, Err::LengthMismatch,
          "coefficient length != grid size");
  return from_spectrum(g, c.cast<std::complex<double>>());
}

Field spectral_shift(const PeriodicGrid& g, const Field& u, double s) {
  CVec c = spectrum(g, u);
  for (int m = 0; m < g.n; ++m) {
    double phase = -freq(g, m) * s;
    c[m] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return from_spectrum(g, c);
}

}  // namespace cmpw
