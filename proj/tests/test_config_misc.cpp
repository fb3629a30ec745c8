#include <atomic>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lpkdv/config.hpp"
#include "lpkdv/errors.hpp"
#include "lpkdv/experiments.hpp"
#include "lpkdv/parallel.hpp"
#include "lpkdv/scaling_fit.hpp"

using namespace lpkdv;
using doctest::Approx;
using nlohmann::json;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const auto c = parse_config(json::object());
    CHECK(c.p == 1.5);
    CHECK(c.q == 0.5);
    CHECK(c.N_list == std::vector<long>{16, 32, 64});
    CHECK(c.lattice.method == "rows");
    CHECK(c.commutators.eps.size() == 4);
    CHECK(c.tolerance("missing", 0.25) == 0.25);
    CHECK(c.coefficients().M1 == Approx(std::sqrt(5.0)));
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"pp", 1.0}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"envelope", {{"shape", "x"}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"p", 0.5}, {"q", 0.5}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"N_list", {32, 16}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"commutators", {{"eps", {1e-3, 4e-4, 2e-4}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"lattice", {{"method", "euler"}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"p", "big"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"kappa", 1.0471975511965976}}), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
  }

  TEST_CASE("to_json round trip") {
    const auto c = parse_config(json{{"p", 2.0},
                                     {"q", 1.0},
                                     {"kappa", 1.2},
                                     {"envelope", {{"kind", "sech"}, {"width", 3.0}}},
                                     {"lattice", {{"Nn", 40}, {"method", "ivp"}}},
                                     {"tolerances", {{"spectrum", 1e-9}}}});
    const auto back = parse_config(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.envelope.kind == "sech");
    CHECK(back.lattice.Nn == 40);
    CHECK(back.tolerance("spectrum", 0.0) == 1e-9);
  }
}

TEST_SUITE("support") {
  TEST_CASE("fit_line") {
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == Approx(2.0));
    CHECK(f.intercept == Approx(1.0));
    CHECK(f.r2 == Approx(1.0));
    CHECK_THROWS_AS(fit_line({1}, {2}), PreconditionError);
    CHECK_THROWS_AS(fit_line({1, 1}, {2, 3}), PreconditionError);
  }

  TEST_CASE("fit_power_law statuses") {
    const auto f = fit_power_law({0.1, 0.2, 0.4}, {1e-5, 3.2e-4, 1.024e-2});
    CHECK(f.status == "fit");
    CHECK(*f.exponent == Approx(5.0));
    CHECK(fit_power_law({1, 2, 3}, {0, 0, 0}).status == "exact");
    CHECK(fit_power_law({1, 2, 3}, {1e-17, 2e-17, 0}, 1e-15).status == "below floor");
    CHECK(fit_power_law({1, 2, 3}, {1e-17, 2e-17, 1e-3}, 1e-15).status == "insufficient data");
  }

  TEST_CASE("parallel_for covers the range and reports the lowest failing index") {
    const unsigned old = thread_count();
    set_thread_count(4);
    CHECK(thread_count() == 4);
    std::vector<int> hit(100, 0);
    parallel_for(0, 100, [&](std::ptrdiff_t i) { hit[static_cast<std::size_t>(i)] += 1; });
    for (int h : hit) CHECK(h == 1);
    for (int rep = 0; rep < 5; ++rep) {
      try {
        parallel_for(0, 64, [](std::ptrdiff_t i) {
          if (i == 10 || i == 40 || i == 63) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
      } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "10");
      }
    }
    set_thread_count(old);
  }

  TEST_CASE("build info") {
    const auto b = build_info();
    for (const char* k : {"lpkdv", "compiler", "eigen", "boost", "fftw"}) CHECK(b.contains(k));
  }

  TEST_CASE("lattice solution from config") {
    auto c = parse_config(json{{"lattice", {{"Nn", 30}, {"Nm", 6}}}});
    const auto r = check_lattice_simulation(c);
    CHECK(r.pass);
    CHECK(r.report.at("Nn") == 30);
  }
}
