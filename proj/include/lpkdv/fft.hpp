#pragma once

#include <complex>
#include <vector>

namespace lpkdv {

using cplx = std::complex<double>;

/// Unnormalised forward (e^{-ikx}) DFT of length L.
std::vector<cplx> dft(const std::vector<cplx>& in);
/// Inverse DFT including the 1/L factor.
std::vector<cplx> idft(const std::vector<cplx>& in);

/// Angular wavenumbers 2 pi j / period in FFT order. For even L the Nyquist
/// entry is reported as -pi L / period.
std::vector<double> wavenumbers(std::size_t L, double period);

/// d^order u / dx^order on a periodic grid, by Fourier multiplication. The
/// Nyquist mode is dropped for odd orders.
std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, double period, int order);

/// Trigonometric interpolant of periodic samples u_j = f(x0 + j period / L).
/// An even-L Nyquist mode is split symmetrically, so real data give a real
/// interpolant.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(const std::vector<cplx>& samples, double x0, double period);
  /// Built directly from Fourier coefficients c_j (same layout as dft()/L).
  static TrigInterpolant from_coefficients(std::vector<cplx> coeffs, double x0, double period);

  cplx operator()(double x) const;
  std::vector<cplx> evaluate(const std::vector<double>& xs) const;
  double x0() const noexcept { return x0_; }
  double period() const noexcept { return period_; }
  const std::vector<cplx>& coefficients() const noexcept { return c_; }

 private:
  std::vector<cplx> c_;  // dft()/L
  double x0_ = 0.0, period_ = 1.0;
};

}  // namespace lpkdv
