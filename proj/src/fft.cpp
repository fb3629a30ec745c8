#include "lpkdv/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "lpkdv/errors.hpp"

namespace lpkdv {

namespace {

std::mutex plan_mutex;

/// Plans are created once per (length, direction) and reused through the
/// new-array execute interface, which is thread safe.
fftw_plan plan_for(std::size_t L, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find({L, sign});
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(L), b(L);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(L), reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericalError("FFTW planning failed for length " + std::to_string(L));
  cache.emplace(std::make_pair(L, sign), p);
  return p;
}

std::vector<cplx> run(const std::vector<cplx>& in, int sign) {
  if (in.empty()) throw PreconditionError("dft: empty input");
  std::vector<cplx> src(in), out(in.size());
  fftw_execute_dft(plan_for(in.size(), sign), reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> dft(const std::vector<cplx>& in) { return run(in, FFTW_FORWARD); }

std::vector<cplx> idft(const std::vector<cplx>& in) {
  auto out = run(in, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(in.size());
  for (auto& z : out) z *= s;
  return out;
}

std::vector<double> wavenumbers(std::size_t L, double period) {
  std::vector<double> k(L);
  const long half = static_cast<long>(L) / 2;
  for (std::size_t j = 0; j < L; ++j) {
    long jj = static_cast<long>(j);
    if (jj >= (static_cast<long>(L) + 1) / 2) jj -= static_cast<long>(L);
    if (L % 2 == 0 && jj == half) jj = -half;
    k[j] = 2.0 * std::numbers::pi * static_cast<double>(jj) / period;
  }
  return k;
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, double period, int order) {
  if (order < 0) throw DomainError("spectral_derivative: negative order");
  const std::size_t L = u.size();
  auto c = dft(u);
  const auto k = wavenumbers(L, period);
  for (std::size_t j = 0; j < L; ++j) {
    if (L % 2 == 0 && j == L / 2 && order % 2 == 1) {
      c[j] = 0.0;
      continue;
    }
    c[j] *= std::pow(cplx(0.0, k[j]), order);
  }
  return idft(c);
}

// ---------------------------------------------------------------------------

TrigInterpolant::TrigInterpolant(const std::vector<cplx>& samples, double x0, double period)
    : c_(dft(samples)), x0_(x0), period_(period) {
  const double s = 1.0 / static_cast<double>(samples.size());
  for (auto& z : c_) z *= s;
}

TrigInterpolant TrigInterpolant::from_coefficients(std::vector<cplx> coeffs, double x0,
                                                   double period) {
  TrigInterpolant t;
  t.c_ = std::move(coeffs);
  t.x0_ = x0;
  t.period_ = period;
  return t;
}

cplx TrigInterpolant::operator()(double x) const {
  const std::size_t L = c_.size();
  const double th = 2.0 * std::numbers::pi * (x - x0_) / period_;
  const cplx step = std::polar(1.0, th);
  const std::size_t pos_end = L / 2 + (L % 2);  // modes 0..pos_end-1 are non-negative
  // Positive modes j = 0..ceil(L/2)-1 and negative modes j - L.
  cplx acc = 0.0, e = 1.0;
  for (std::size_t j = 0; j < pos_end; ++j) {
    acc += c_[j] * e;
    e *= step;
  }
  if (L % 2 == 0) {
    // e = step^{L/2}; Nyquist split as cos.
    acc += c_[L / 2] * 0.5 * (e + std::conj(e));
  }
  const cplx back = std::conj(step);
  e = back;
  for (std::size_t j = L - 1; j >= L / 2 + 1; --j) {
    acc += c_[j] * e;
    e *= back;
  }
  return acc;
}

std::vector<cplx> TrigInterpolant::evaluate(const std::vector<double>& xs) const {
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

}  // namespace lpkdv
