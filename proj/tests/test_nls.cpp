#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lpkdv/errors.hpp"
#include "lpkdv/fft.hpp"
#include "lpkdv/multiscale_reduction.hpp"
#include "lpkdv/nls_dynamics.hpp"

using namespace lpkdv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

NlsCoefficients reference() { return compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2).nls(); }

}  // namespace

TEST_SUITE("fft") {
  TEST_CASE("transform round trip and derivatives") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cplx> v(48);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    CHECK(max_diff(idft(dft(v)), v) < 1e-13);

    const double P = 10.0;
    std::vector<cplx> s(64), ds(64), d3(64);
    for (std::size_t j = 0; j < 64; ++j) {
      const double x = P * static_cast<double>(j) / 64.0, k = 2 * kPi * 3 / P;
      s[j] = std::sin(k * x);
      ds[j] = k * std::cos(k * x);
      d3[j] = -k * k * k * std::cos(k * x);
    }
    CHECK(max_diff(spectral_derivative(s, P, 1), ds) < 1e-11);
    CHECK(max_diff(spectral_derivative(s, P, 3), d3) < 1e-9);
    const auto k = wavenumbers(8, 2 * kPi);
    CHECK(k[1] == Approx(1.0));
    CHECK(k[4] == Approx(-4.0));
    CHECK(k[7] == Approx(-1.0));
  }

  TEST_CASE("trigonometric interpolation is exact on band-limited data") {
    const double P = 7.0, x0 = -2.0;
    const auto f = [&](double x) { return cplx(std::cos(2 * kPi * 2 * (x - x0) / P), std::sin(2 * kPi * (x - x0) / P)); };
    std::vector<cplx> s(16);
    for (std::size_t j = 0; j < 16; ++j) s[j] = f(x0 + P * static_cast<double>(j) / 16.0);
    const TrigInterpolant I(s, x0, P);
    for (double x : {-1.3, 0.0, 2.71, 4.9}) CHECK(std::abs(I(x) - f(x)) < 1e-13);
    // Real data (with a Nyquist component) stay real.
    std::vector<cplx> r(8);
    for (std::size_t j = 0; j < 8; ++j) r[j] = j % 2 == 0 ? 1.0 : -1.0;
    const TrigInterpolant R(r, 0.0, 8.0);
    CHECK(std::abs(R(0.5).imag()) < 1e-15);
  }
}

TEST_SUITE("nls_dynamics") {
  TEST_CASE("coefficients") {
    CHECK_THROWS_AS((NlsCoefficients{0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((NlsCoefficients{1.0, NAN}.validate()), DomainError);
    const auto c = reference();
    CHECK(c.rho1 == Approx(-1.2).epsilon(1e-12));
    CHECK(c.defocusing());
  }

  TEST_CASE("right-hand side") {
    const auto c = reference();
    const auto z = plane_envelope(32, 0.5, 0.0, 0.0);
    CHECK(max_diff(nls_rhs(z, c), z.values()) == 0.0);
    const cplx A(0.6, -0.2);
    const auto cst = plane_envelope(32, 0.5, A, 0.0);
    for (const auto& v : nls_rhs(cst, c)) CHECK(std::abs(v - cplx(0, -1) * c.rho2 * std::norm(A) * A) < 1e-14);
    const double k = 2 * kPi * 2 / 16.0;
    const auto pw = plane_envelope(32, 0.5, A, k);
    const auto rhs = nls_rhs(pw, c);
    for (std::size_t j = 0; j < 32; ++j)
      CHECK(std::abs(rhs[j] - cplx(0, -1) * (-c.rho1 * k * k + c.rho2 * std::norm(A)) * pw.values()[j]) < 1e-12);
  }

  TEST_CASE("evolution: exact solutions") {
    const auto c = reference();
    const auto z = nls_evolve(plane_envelope(32, 0.5, 0.0, 0.0), c, 1.0, 0.01);
    for (const auto& v : z.values()) CHECK(v == cplx(0.0));
    CHECK(z.tau() == 1.0);

    const cplx A(0.8, 0.1);
    const auto cst = nls_evolve(plane_envelope(64, 0.25, A, 0.0), c, 1.0, 0.01);
    for (const auto& v : cst.values()) CHECK(std::abs(v - A * std::exp(cplx(0, -c.rho2 * std::norm(A)))) < 1e-8);

    const double k = 2 * kPi * 3 / 16.0;
    const auto pw0 = plane_envelope(64, 0.25, A, k);
    const auto pw = nls_evolve(pw0, c, 1.0, 0.01);
    const double Om = c.rho2 * std::norm(A) - c.rho1 * k * k;
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(std::abs(pw.values()[j] - pw0.values()[j] * std::exp(cplx(0, -Om))) < 1e-8);
      CHECK(std::abs(std::abs(pw.values()[j]) - std::abs(A)) < 1e-8);
    }
  }

  TEST_CASE("evolution lands exactly on the requested time") {
    const auto c = reference();
    auto e = gaussian_envelope(128, 40.0 / 128, 1.0, 2.0, 20.0);
    e.set_tau(0.3);
    const auto out = nls_evolve(e, c, 1.0, 0.03);
    CHECK(out.tau() == 1.0);
    // Two legs equal one leg to the scheme's accuracy.
    const auto leg = nls_evolve(nls_evolve(e, c, 0.65, 0.03), c, 1.0, 0.03);
    CHECK(max_diff(leg.values(), out.values()) < 1e-6);
  }

  TEST_CASE("fourth-order convergence in dtau") {
    const auto c = reference();
    const auto e = sech_envelope(256, 60.0 / 256, 1.0, 2.0, 30.0);
    const auto ref = nls_evolve(e, c, 1.0, 0.005);
    const double e1 = max_diff(nls_evolve(e, c, 1.0, 0.1).values(), ref.values());
    const double e2 = max_diff(nls_evolve(e, c, 1.0, 0.05).values(), ref.values());
    CHECK(e1 / e2 == Approx(16.0).epsilon(0.25));
  }

  TEST_CASE("mass, phase and translation equivariance") {
    const auto c = reference();
    const auto e = gaussian_envelope(256, 60.0 / 256, 1.2, 2.0, 30.0);
    const auto out = nls_evolve(e, c, 1.0, 0.002);
    CHECK(std::abs(mass(out) - mass(e)) / mass(e) < 1e-8);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
    for (int t = 0; t < 3; ++t) {
      const cplx rot = std::exp(cplx(0, ph(rng)));
      Envelope r = e;
      for (auto& v : r.values()) v *= rot;
      auto expect = out.values();
      for (auto& v : expect) v *= rot;
      CHECK(max_diff(nls_evolve(r, c, 1.0, 0.002).values(), expect) < 1e-10);
    }
    Envelope s = e;
    std::rotate(s.values().begin(), s.values().begin() + 37, s.values().end());
    auto expect = out.values();
    std::rotate(expect.begin(), expect.begin() + 37, expect.end());
    CHECK(max_diff(nls_evolve(s, c, 1.0, 0.002).values(), expect) < 1e-10);
  }

  TEST_CASE("symmetry flows") {
    const auto c = reference();
    const auto g = gaussian_envelope(64, 0.5, 1.0, 2.0, 16.0);
    const auto h1 = symmetry_rhs(g, c, Flow::h1);
    for (std::size_t j = 0; j < 64; ++j) CHECK(h1[j] == cplx(0, 1) * g.values()[j]);
    const double k = 2 * kPi * 2 / 32.0;
    const cplx A(0.5, 0.5);
    const auto pw = plane_envelope(64, 0.5, A, k);
    const auto h2 = symmetry_rhs(pw, c, Flow::h2);
    for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(h2[j] - cplx(0, k) * pw.values()[j]) < 1e-12);
    for (const auto& v : symmetry_rhs(plane_envelope(64, 0.5, A, 0.0), c, Flow::h4)) CHECK(std::abs(v) < 1e-13);
    CHECK(symmetry_rhs(g, c, Flow::h3) == nls_rhs(g, c));
    CHECK(flow_from_string("nls") == Flow::h3);
    CHECK(flow_from_string("h4") == Flow::h4);
    CHECK_THROWS(flow_from_string("h5"));
  }

  TEST_CASE("commutators") {
    const auto c = reference();
    const auto g = gaussian_envelope(256, 60.0 / 256, 1.0, 2.0, 30.0);
    CHECK(commutator_norm(c, g, Flow::h1, Flow::h2, 1e-4) <= 1e-8);
    CHECK(commutator_norm(c, g, Flow::h3, Flow::h1, 1e-4) <= 1e-8);

    const Flow fl[] = {Flow::h3, Flow::h1, Flow::h2, Flow::h4};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const auto r = commutator_test(c, g, fl[i], fl[j]);
        CAPTURE(r.to_json().dump());
        CHECK(r.pass);
      }
    const auto nh4 = commutator_test(c, g, Flow::h3, Flow::h4);
    CHECK(nh4.checked_halvings >= 1);
    CHECK(nh4.ratio.front() >= 3.5);
    CHECK(nh4.norm.back() < 1e-7);
  }

  TEST_CASE("commutator test rejects a non-symmetry") {
    const auto c = reference();
    const auto g = gaussian_envelope(256, 60.0 / 256, 1.0, 2.0, 30.0);
    // |u|^2 u_xi alone does not commute with the NLS flow.
    const FlowMap bad = [](const Envelope& e) {
      auto ux = spectral_derivative(e.values(), e.period(), 1);
      for (std::size_t j = 0; j < ux.size(); ++j) ux[j] *= std::norm(e.values()[j]);
      return ux;
    };
    const auto r = commutator_test(flow_map(c, Flow::h3), bad, g);
    CHECK_FALSE(r.pass);
    CHECK(r.verdict == "no O(eps^2) decrease");
  }

  TEST_CASE("commutator preconditions") {
    const auto c = reference();
    // Unresolved: a top-third wavenumber.
    const auto rough = plane_envelope(32, 0.5, 1.0, 2 * kPi * 14 / 16.0);
    CHECK_THROWS_AS(commutator_test(c, rough, Flow::h1, Flow::h2), PreconditionError);
    const auto g = gaussian_envelope(64, 0.5, 1.0, 2.0, 16.0);
    CHECK_THROWS_AS(commutator_test(c, g, Flow::h1, Flow::h2, {1e-4, 3e-5, 1e-5}), PreconditionError);
    CHECK_THROWS_AS(commutator_test(c, g, Flow::h1, Flow::h2, {1e-4, 5e-5}), PreconditionError);
  }

  TEST_CASE("envelope CSV round trip") {
    const auto g = gaussian_envelope(32, 0.5, cplx(1.0).real(), 2.0, 8.0);
    std::stringstream ss;
    write_envelope_csv(g, ss);
    const auto back = read_envelope_csv(ss);
    CHECK(back.size() == 32);
    CHECK(back.dxi() == Approx(0.5).epsilon(1e-15));
    CHECK(max_diff(back.values(), g.values()) == 0.0);
  }
}
