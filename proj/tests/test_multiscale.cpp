#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lpkdv/errors.hpp"
#include "lpkdv/multiscale_reduction.hpp"

using namespace lpkdv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ReductionCoefficients reference() { return compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2); }

Envelope gaussian() { return gaussian_envelope(512, 60.0 / 512, 1.0, 2.0, 30.0); }

}  // namespace

TEST_SUITE("multiscale_reduction") {
  TEST_CASE("reference coefficients") {
    const auto c = reference();
    CHECK(c.M1 == Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(c.M1_tilde == Approx(3.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(c.rho1 == Approx(-1.2).epsilon(1e-12));
    CHECK(c.rho2 == Approx(16.0 / 75.0).epsilon(1e-12));
    CHECK(std::abs(c.tau2 - cplx(0.0, 1.0 / 3.0)) < 1e-12);
    CHECK(std::abs(c.tau1 - cplx(-4.0 / (3.0 * std::sqrt(5.0)), 0.0)) < 1e-12);
    CHECK(c.branch == -1);
    CHECK(c.carrier.omega() == Approx(-2.49809).epsilon(1e-5));
    CHECK(c.im_ratio_M1 <= 1e-10);
    CHECK(c.im_ratio_M1_tilde <= 1e-10);
    CHECK_FALSE(c.tau4.has_value());
    CHECK(compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2, 1.0, 1.0, {}, true).tau4.has_value());
    const auto j = c.to_json();
    CHECK(j.at("M1").get<double>() == Approx(2.23607).epsilon(1e-5));
  }

  TEST_CASE("coefficients scale with r and M2_tilde") {
    const auto a = compute_coefficients(LpkdvParams(1.5, 0.5), 1.2, 1.0, 1.0);
    const auto b = compute_coefficients(LpkdvParams(1.5, 0.5), 1.2, 2.0, 3.0);
    CHECK(b.M1 == Approx(2.0 * a.M1));
    CHECK(b.M1_tilde == Approx(2.0 * a.M1_tilde));
    CHECK(b.rho1 == Approx(a.rho1 * 4.0 / 3.0));
    CHECK(b.rho2 == Approx(a.rho2 / 3.0));
  }

  TEST_CASE("domain errors and branches") {
    // zeta cos(kappa) = mu at kappa = pi/3 for (1.5, 0.5).
    CHECK_THROWS_AS(compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 3), DomainError);
    CHECK_THROWS_AS(compute_coefficients(LpkdvParams(1.5, 0.5), 0.0), DomainError);
    CHECK_THROWS_AS(compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2, 1.0, 1.0, 1), PreconditionError);
    CHECK_NOTHROW(compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2, 1.0, 1.0, -1));
  }

  TEST_CASE("M1 and M1_tilde are positive and real on random draws") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> up(0.3, 3.0), uq(-3.0, 3.0), uk(0.1, kPi - 0.1);
    int done = 0;
    while (done < 40) {
      const double p = up(rng), q = uq(rng), k = uk(rng);
      if (std::abs(p - q) < 0.1 || std::abs(p + q) < 0.1 || std::abs((p + q) * std::cos(k) - (p - q)) < 1e-3) continue;
      const LpkdvParams pr(p, q);
      const auto c = compute_coefficients(pr, k);
      CHECK(c.M1 > 0.0);
      CHECK(c.M1_tilde > 0.0);
      CHECK(std::abs(c.M1_tilde / c.M1) == Approx(std::abs(group_velocity(pr, k))).epsilon(1e-6));
      ++done;
    }
  }

  TEST_CASE("group velocity") {
    const LpkdvParams a(2.0, 1.0);
    CHECK(group_velocity(a, kPi / 2) == Approx(-0.8).epsilon(1e-9));
    CHECK(group_velocity_exact(a, kPi / 2) == Approx(-0.8).epsilon(1e-14));
    CHECK(group_velocity(a, 1e-4) == Approx(-2.0).epsilon(1e-6));
    const LpkdvParams b(1.5, 0.5);
    CHECK(group_velocity(b, kPi / 2) == Approx(-0.6).epsilon(1e-9));
    const auto c = reference();
    CHECK(group_velocity(b, kPi / 2) == Approx(-c.M1_tilde / c.M1).epsilon(1e-9));
    for (double k : {0.3, 1.0, 2.0, 2.9}) CHECK(group_velocity(b, k) == Approx(group_velocity_exact(b, k)).epsilon(1e-8));
  }

  TEST_CASE("slow coordinates are constant along the characteristic") {
    const auto c = reference();
    const SlowCoordinates sc(c, 32, 1.5, 0.2);
    const double x0 = sc.xi(3.0, 4.0);
    for (double t : {0.5, 1.0, 7.0}) CHECK(sc.xi(3.0 + c.branch * c.M1_tilde * t, 4.0 + c.M1 * t) == Approx(x0).epsilon(1e-13));
    CHECK(sc.tau(32.0 * 32.0) == Approx(1.2));
  }

  TEST_CASE("integer embedding") {
    const auto e = integer_embedding(reference());
    CHECK(e.rational);
    CHECK(e.convergents.back() == std::pair<long, long>{5, 3});
    const auto c = compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2, e.r_for_integers);
    CHECK(c.M1 == Approx(5.0).epsilon(1e-12));
    CHECK(c.M1_tilde == Approx(3.0).epsilon(1e-12));
    CHECK_FALSE(integer_embedding(compute_coefficients(LpkdvParams(1.5, 0.5), 1.0)).rational);
  }

  TEST_CASE("zeroth harmonic") {
    const auto c = reference();
    const auto z = build_zeroth_harmonic(plane_envelope(64, 0.5, 0.0, 0.0), c);
    CHECK(z(3.0) == 0.0);
    const auto g = gaussian();
    const auto zh = build_zeroth_harmonic(g, c);
    CHECK(zh(g.xi_min()) == Approx(0.0).epsilon(1e-14));
    const double rise = zh(g.xi_min() + g.period() - 1e-9) - zh(g.xi_min());
    CHECK(rise == Approx(c.tau1.real() * mass(g)).epsilon(1e-10));
    CHECK(zh.total_integral() == Approx(mass(g)).epsilon(1e-12));
    // Monotone ramp (Re tau1 < 0: decreasing).
    double prev = zh(g.xi_min());
    for (int j = 1; j <= 200; ++j) {
      const double v = zh(g.xi_min() + g.period() * j / 200.0);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    CHECK(std::abs(zh.imag_diagnostic()) < 1e-12);
    CHECK_THROWS_AS(build_zeroth_harmonic(plane_envelope(64, 0.5, 1.0, 0.0), c), PreconditionError);
  }

  TEST_CASE("zeroth harmonic grows linearly under a flat top") {
    const auto c = reference();
    // Smooth plateau of height 0.5 on [20, 40].
    std::vector<cplx> v(512);
    const double dxi = 60.0 / 512;
    for (std::size_t j = 0; j < 512; ++j) {
      const double x = j * dxi;
      v[j] = 0.25 * (std::tanh((x - 15.0) / 1.0) - std::tanh((x - 45.0) / 1.0));
    }
    const Envelope e(0.0, dxi, v);
    const auto zh = build_zeroth_harmonic(e, c);
    const double slope = (zh(35.0) - zh(25.0)) / 10.0;
    CHECK(slope == Approx(c.tau1.real() * 0.25).epsilon(1e-6));
  }

  TEST_CASE("second harmonic") {
    const auto c = reference();
    const auto one = build_second_harmonic(plane_envelope(16, 1.0, 1.0, 0.0), c);
    for (const auto& v : one) CHECK(std::abs(v - cplx(0, 1.0 / 3.0)) < 1e-14);
    const auto g = gaussian_envelope(64, 0.5, cplx(1.0).real(), 2.0, 16.0);
    const auto s = build_second_harmonic(g, c);
    for (std::size_t j = 0; j < 64; ++j)
      CHECK(std::abs(s[j]) == Approx(std::abs(c.tau2) * std::norm(g.values()[j])).epsilon(1e-14));
    for (const auto& v : build_second_harmonic(plane_envelope(16, 1.0, 0.0, 0.0), c)) CHECK(v == cplx(0.0));
  }

  TEST_CASE("assembled ansatz") {
    const auto c = reference();
    const auto zero = assemble_ansatz(plane_envelope(512, 60.0 / 512, 0.0, 0.0), c, 16, 40, 10);
    CHECK(zero.assembled.max_abs() == 0.0);

    const auto g = gaussian();
    const auto a16 = assemble_ansatz(g, c, 16, 64, 16);
    const auto a32 = assemble_ansatz(g, c, 32, 128, 32);
    CHECK(a16.assembled.is_real());
    CHECK(a32.assembled.kind() == FieldKind::real);
    CHECK(a16.assembled.max_abs() / a32.assembled.max_abs() == Approx(2.0).epsilon(0.1));
    CHECK(a16.first_harmonic.Nn() == 64);

    try {
      (void)assemble_ansatz(g, c, 4, 400, 0);
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("n=") != std::string::npos);
    }
  }

  TEST_CASE("residual scaling") {
    const auto c = reference();
    const auto zero = residual_scaling(plane_envelope(512, 60.0 / 512, 0.0, 0.0), c, {8, 16, 32});
    CHECK(zero.status == "exact");
    CHECK_FALSE(zero.exponent.has_value());
    CHECK_THROWS_AS(residual_scaling(gaussian(), c, {16, 32}), PreconditionError);
    CHECK_THROWS_AS(residual_scaling(gaussian(), c, {32, 16, 64}), PreconditionError);

    const auto g = gaussian();
    const auto full = residual_scaling(g, c, {16, 32, 64});
    REQUIRE(full.exponent);
    CHECK(*full.exponent >= 2.7);
    ScalingOptions o;
    o.ansatz.include_zeroth = false;
    CHECK(*full.exponent - *residual_scaling(g, c, {16, 32, 64}, o).exponent >= 0.7);
    o.ansatz.include_zeroth = true;
    o.ansatz.include_second = false;
    CHECK(*full.exponent - *residual_scaling(g, c, {16, 32, 64}, o).exponent >= 0.7);
    CHECK(full.to_csv().rfind("N,Nn,Nm,residual", 0) == 0);
  }

  TEST_CASE("freezing the envelope raises the residual at every N") {
    const auto c = reference();
    const auto g = gaussian();
    const auto full = residual_scaling(g, c, {16, 32, 64});
    ScalingOptions o;
    o.ansatz.frozen = true;
    const auto frozen = residual_scaling(g, c, {16, 32, 64}, o);
    for (std::size_t i = 0; i < 3; ++i) CHECK(frozen.residual[i] > full.residual[i]);
  }

  // A frozen envelope leaves an O(1/N^3) first-harmonic residual, the same
  // order as the neglected higher harmonics, so the exponent stays near 3.
  // Kept as a documented expected failure.
  TEST_CASE("frozen envelope loses 0.7 in the residual exponent" * doctest::should_fail()) {
    const auto c = reference();
    const auto g = gaussian();
    ScalingOptions o;
    o.ansatz.frozen = true;
    const auto full = residual_scaling(g, c, {16, 32, 64});
    const auto frozen = residual_scaling(g, c, {16, 32, 64}, o);
    CHECK(*full.exponent - *frozen.exponent >= 0.7);
  }
}
