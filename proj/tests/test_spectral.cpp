#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lpkdv/errors.hpp"
#include "lpkdv/spectral_tools.hpp"

using namespace lpkdv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> kink_row(long Nn, double amplitude, double center, double width) {
  std::vector<cplx> row(static_cast<std::size_t>(Nn + 1));
  for (long n = 0; n <= Nn; ++n) row[static_cast<std::size_t>(n)] = amplitude * std::tanh((n - center) / width);
  return row;
}

LatticeField kink_solution(long margin, long steps, const LpkdvParams& pr) {
  const long Nn = 2 * margin + 50;
  const auto row0 = kink_row(Nn, 0.8, static_cast<double>(margin + 45), 3.0);
  return evolve_rows(row0, std::vector<cplx>(static_cast<std::size_t>(steps + 1), row0.back()), pr);
}

ZsProblem free_box(double len, double kappa) {
  ZsProblem zs;
  zs.potential = [](double) { return cplx(0.0); };
  zs.xi_a = 0.0;
  zs.xi_b = len;
  zs.kappa = kappa;
  zs.p = 1.5;
  zs.scale = std::sqrt(5.0);
  return zs;
}

}  // namespace

TEST_SUITE("spectral_tools") {
  TEST_CASE("a_n of a zero row is 1") {
    const auto sp = spectral_problem_from_row(std::vector<cplx>(20, 0.0), 1.5, 0);
    CHECK(sp.a.size() == 17);
    CHECK(sp.n_first == 1);
    for (const auto& a : sp.a) CHECK(std::abs(a - 1.0) < 1e-15);
  }

  TEST_CASE("a_n of a constant row") {
    const double p = 1.5, c = 0.3;
    const auto lit = spectral_problem_from_row(std::vector<cplx>(12, c), p, 0, SpectralBoundary::dirichlet,
                                               CoefficientForm::literal);
    for (const auto& a : lit.a) CHECK(a.real() == Approx(4 * p * p / ((2 * p - 2 * c) * (2 * p - 2 * c))));
    // The difference form only sees differences of u.
    const auto dif = spectral_problem_from_row(std::vector<cplx>(12, c), p, 0);
    for (const auto& a : dif.a) CHECK(std::abs(a - 1.0) < 1e-15);
  }

  TEST_CASE("a_n depends only on u_{n-1} .. u_{n+2}") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-0.2, 0.2);
    std::vector<cplx> row(30);
    for (auto& v : row) v = d(rng);
    const auto base = spectral_problem_from_row(row, 1.0, 0);
    auto moved = row;
    moved[15] += 0.05;
    const auto other = spectral_problem_from_row(moved, 1.0, 0);
    for (std::size_t i = 0; i < base.a.size(); ++i) {
      const long n = static_cast<long>(i) + 1;
      if (n >= 13 && n <= 16) CHECK(base.a[i] != other.a[i]);
      else CHECK(base.a[i] == other.a[i]);
    }
  }

  TEST_CASE("free Dirichlet and periodic spectra") {
    const std::size_t L = 40;
    const auto dir = eigenvalues(SpectralProblem{1, std::vector<cplx>(L, 1.0), SpectralBoundary::dirichlet});
    for (std::size_t j = 0; j < L; ++j) {
      const double ref = -2.0 * std::cos(kPi * static_cast<double>(j + 1) / static_cast<double>(L + 1));
      CHECK(std::abs(dir[j] - ref) < 1e-12);
    }
    const auto per = eigenvalues(SpectralProblem{1, std::vector<cplx>(L, 1.0), SpectralBoundary::periodic});
    CHECK(per.back().real() == Approx(2.0));
    CHECK(per.front().real() == Approx(-2.0));
    CHECK(std::count_if(per.begin(), per.end(), [](cplx z) { return std::abs(z.real()) < 1e-12; }) == 2);
    CHECK_THROWS_AS(eigenvalues(SpectralProblem{1, std::vector<cplx>(7, 1.0), SpectralBoundary::dirichlet}),
                    PreconditionError);
  }

  TEST_CASE("symmetrised and dense solvers agree") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.4, 2.0);
    SpectralProblem sp{1, {}, SpectralBoundary::dirichlet};
    for (int i = 0; i < 50; ++i) sp.a.emplace_back(d(rng));
    const auto a = eigenvalues(sp);
    const auto b = eigenvalues(sp, {true});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
  }

  TEST_CASE("vanishing denominator reports the site") {
    std::vector<cplx> row(12, 0.0);
    // 2p - (u_{n+2} - u_n) = 0 at n = 4 with p = 1.
    row[6] = 2.0;
    try {
      (void)spectral_problem_from_row(row, 1.0, 3);
      FAIL("expected SingularPotentialError");
    } catch (const SingularPotentialError& e) {
      CHECK(e.site().n == 4);
      CHECK(e.site().m == 3);
    }
  }

  TEST_CASE("isospectral drift") {
    const LpkdvParams pr(1.5, 0.5);
    const LatticeField zero(60, 4);
    const auto none = isospectral_drift(zero, pr, {0, 1, 2});
    CHECK(none.status == "no discrete spectrum");
    CHECK(none.drift == 0.0);

    std::vector<long> ms;
    for (long m = 0; m <= 10; ++m) ms.push_back(m);
    const auto narrow = isospectral_drift(kink_solution(30, 10, pr), pr, ms);
    const auto wide = isospectral_drift(kink_solution(60, 10, pr), pr, ms);
    CHECK(narrow.status == "ok");
    CHECK(wide.status == "ok");
    CHECK(wide.drift < 1e-6);
    CHECK(narrow.drift >= 2.0 * wide.drift);
    CHECK(wide.to_json().at("status") == "ok");
  }

  TEST_CASE("isospectral drift preconditions") {
    const LpkdvParams pr(1.5, 0.5);
    auto f = kink_solution(30, 4, pr);
    CHECK_THROWS_AS(isospectral_drift(f, pr, {}), PreconditionError);
    CHECK_THROWS_AS(isospectral_drift(f, pr, {0, 9}), PreconditionError);
    auto broken = f;
    broken(40, 2) += 0.1;
    CHECK_THROWS_AS(isospectral_drift(broken, pr, {0, 1}), PreconditionError);
    // A kink too close to the window edge.
    const auto row0 = kink_row(40, 0.8, 3.0, 3.0);
    const auto edge = evolve_rows(row0, std::vector<cplx>(3, row0.back()), pr);
    CHECK_THROWS_AS(isospectral_drift(edge, pr, {0, 1}), PreconditionError);
  }

  TEST_CASE("free ZS box spectrum") {
    const double len = 20.0, kappa = kPi / 2;
    const auto zs = free_box(len, kappa);
    const auto r = zs_eigenvalues(zs);
    const double unit = 2.0 * std::sin(kappa / 2) * kPi * zs.scale / len;
    int seen = 0;
    for (double mu : r.mu1) {
      if (std::abs(mu) > 3.0) continue;
      ++seen;
      CHECK(std::abs(mu / unit - std::round(mu / unit)) < 1e-8);
    }
    CHECK(seen == 2 * static_cast<int>(std::floor(3.0 / unit)) + 1);
  }

  TEST_CASE("ZS spectrum symmetries") {
    auto zs = free_box(20.0, kPi / 2);
    zs.potential = [](double x) { return cplx(1.0, 0.5) * std::exp(-(x - 9.0) * (x - 9.0) / 4.0); };
    const auto base = zs_eigenvalues(zs).mu1;
    REQUIRE_FALSE(base.empty());

    auto conj = zs;
    conj.potential = [f = zs.potential](double x) { return std::conj(f(x)); };
    auto mirrored = zs_eigenvalues(conj).mu1;
    for (double& v : mirrored) v = -v;
    std::sort(mirrored.begin(), mirrored.end());
    for (double v : base) {
      if (std::abs(v) > 4.0) continue;
      double best = INFINITY;
      for (double w : mirrored) best = std::min(best, std::abs(v - w));
      CHECK(best < 1e-6);
    }

    auto shifted = zs;
    shifted.xi_a += 7.0;
    shifted.xi_b += 7.0;
    shifted.potential = [f = zs.potential](double x) { return f(x - 7.0); };
    const auto moved = zs_eigenvalues(shifted).mu1;
    for (double v : base) {
      if (std::abs(v) > 4.0) continue;
      double best = INFINITY;
      for (double w : moved) best = std::min(best, std::abs(v - w));
      CHECK(best < 1e-6);
    }
  }

  TEST_CASE("third harmonic") {
    CHECK(std::abs(third_harmonic(1.0, 1.0, kPi / 2) - cplx(-1.0, 0.0)) < 1e-14);
    CHECK(third_harmonic(cplx(0.3, 1.0), 0.0, 1.1) == cplx(0.0));
    const cplx a = third_harmonic(cplx(0.2, -0.4), 0.7, 0.9);
    const cplx b = third_harmonic(cplx(0.2, -0.4), 1.4, 0.9);
    CHECK(std::abs(b - 2.0 * a) < 1e-14);
    CHECK_THROWS_AS(third_harmonic(1.0, 1.0, 0.0), DomainError);
  }

  TEST_CASE("spectral limit check") {
    const auto c = compute_coefficients(LpkdvParams(1.5, 0.5), kPi / 2);
    const auto env = gaussian_envelope(512, 60.0 / 512, 1.0, 2.0, 30.0);
    const auto rep = spectral_limit_check(env, c, {16, 32, 64});
    CHECK(rep.pass);
    CHECK(rep.non_increasing);
    REQUIRE(rep.cauchy_ratio.has_value());
    CHECK(*rep.cauchy_ratio == Approx(1.0).epsilon(0.25));
    CHECK(rep.to_json().at("entries").size() == 3);

    // Zero envelope: both sides are free box spectra; they differ by the
    // O(1/N) curvature of the lattice dispersion.
    const auto zero = spectral_limit_check(gaussian_envelope(512, 60.0 / 512, 0.0, 2.0, 30.0), c, {16, 32});
    REQUIRE(zero.entries[0].discrepancy.has_value());
    REQUIRE(zero.entries[1].discrepancy.has_value());
    CHECK(*zero.entries[0].discrepancy < 2.0 / 16);
    CHECK(*zero.entries[1].discrepancy / *zero.entries[0].discrepancy == Approx(0.5).epsilon(0.2));
    CHECK_THROWS_AS(spectral_limit_check(env, c, {}), PreconditionError);
    CHECK_THROWS_AS(spectral_limit_check(env, c, {32, 16}), PreconditionError);
  }

  TEST_CASE("spectrum CSV") {
    std::ostringstream os;
    write_spectrum_csv({cplx(1.0, 0.0), cplx(-0.5, 2.0)}, os);
    CHECK(os.str().rfind("index,re,im\n", 0) == 0);
    CHECK(os.str().find("1,-0.5,2\n") != std::string::npos);
  }
}
