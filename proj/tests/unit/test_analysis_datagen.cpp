#include <doctest.h>

#include <cmath>
#include <numbers>

#include "l1subdiv/analysis.hpp"
#include "l1subdiv/datagen.hpp"
#include "l1subdiv/errors.hpp"

using namespace l1subdiv;

TEST_SUITE("analysis") {
  TEST_CASE("basic limit at level 0 is the impulse") {
    const auto s = basic_limit(make_scheme(10, 1), 0, 20);
    REQUIRE(s.params.size() == 41);
    CHECK(s.params.front() == -20.0);
    for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(s.values[i] == (s.params[i] == 0.0 ? 1.0 : 0.0));
    CHECK(support_width(s, 1e-12) == 0.0);
    CHECK_THROWS_AS(basic_limit(make_scheme(10, 1), 2, 19), InputError);
  }

  TEST_CASE("support widths") {
    for (int d = 1; d <= 3; ++d) {
      const auto ten = basic_limit(make_scheme(10, d), 6, 24);
      const double spacing = 1.0 / 64.0;
      CHECK(std::abs(limit_support_width(ten, 1e-12) - 19.0) <= spacing);
      CHECK(support_width(ten, 1e-12) <= 19.0);
      const auto thirteen = basic_limit(make_scheme(13, d), 6, 28);
      CHECK(std::abs(limit_support_width(thirteen, 1e-12) - 25.0) <= spacing);
    }
  }

  TEST_CASE("support width is monotone in the tolerance") {
    const auto s = basic_limit(make_scheme(11, 2), 4, 24);
    double prev = support_width(s, 1e-14);
    for (double tol : {1e-12, 1e-9, 1e-6, 1e-3, 1e-1}) {
      const double w = support_width(s, tol);
      CHECK(w <= prev);
      prev = w;
    }
    CHECK_THROWS_AS(support_width(s, 0.0), ConfigError);
  }

  TEST_CASE("overshoot") {
    LimitSamples s;
    s.params = {0, 1, 2, 3};
    s.values = {-1, -0.5, 0.5, 1};
    CHECK(overshoot(s, -1, 1) == 0.0);
    s.values = {-1.2, 0, 0, 1.1};
    CHECK(overshoot(s, -1, 1) == doctest::Approx(0.15));
    CHECK_THROWS_AS(overshoot(s, 1, 1), ConfigError);

    const auto step = sample_function("g4", -15.5, 15.5, 32);
    const auto cubic = subdivide(step, make_scheme(10, 3), 4);
    const auto line = subdivide(step, make_scheme(10, 1), 4);
    CHECK(overshoot(LimitSamples::from_polygon(cubic), -10, 10) > 0.01);
    CHECK(overshoot(LimitSamples::from_polygon(line), -10, 10) < 0.01);
  }

  TEST_CASE("non-negative masks never overshoot") {
    // D_{4,1} with unit weights has the mask (0.325, 0.275, 0.225, 0.175).
    auto spec = make_scheme(4, 1);
    spec.fit.constant_weights = true;
    const auto step = sample_function("g4", -15.5, 15.5, 32);
    CHECK(overshoot(LimitSamples::from_polygon(subdivide(step, spec, 3)), -10, 10) == 0.0);
  }

  TEST_CASE("reproduction error") {
    const auto g1 = test_function("g1");
    const auto data = sample_function("g1", -2, 7, 30);
    const auto exact = reproduction_error(LimitSamples::from_polygon(data), g1);
    CHECK(exact.max_abs == 0.0);
    CHECK(exact.rms == 0.0);
    double gmax = 0.0;
    for (double v : data.values) gmax = std::max(gmax, std::abs(v));
    const auto quad = reproduction_error(LimitSamples::from_polygon(subdivide(data, make_scheme(10, 2), 5)), g1);
    CHECK(quad.max_abs <= 1e-8 * gmax);
    const auto line = reproduction_error(LimitSamples::from_polygon(subdivide(data, make_scheme(10, 1), 5)), g1);
    CHECK(line.max_abs > 1e-3);
    CHECK(line.rms <= line.max_abs);
  }

  TEST_CASE("interpolation at the original samples") {
    // Degree-2 schemes interpolate quadratic data: the refined curve passes
    // through the control values.
    const auto data = sample_function("g1", -2, 7, 30);
    const auto s = LimitSamples::from_polygon(subdivide(data, make_scheme(10, 2), 5));
    std::size_t checked = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.param(i) < s.params.front() || data.param(i) > s.params.back()) continue;
      CHECK(std::abs(interpolate(s, data.param(i)) - data.at(i)) <= 1e-6);
      ++checked;
    }
    CHECK(checked >= 10);
    CHECK(interpolate(s, -100.0) == s.values.front());
  }

  TEST_CASE("successive levels contract") {
    for (int h : {10, 11}) {
      const auto diffs = level_differences(make_scheme(h, 2), 6, 4 * (h / 2) + 4);
      REQUIRE(diffs.size() == 6);
      for (std::size_t k = diffs.size() - 3; k + 1 < diffs.size(); ++k) CHECK(diffs[k + 1] < diffs[k]);
    }
  }
}

TEST_SUITE("datagen") {
  TEST_CASE("test functions") {
    CHECK(test_function("g1")(0) == 3.0);
    CHECK(test_function("g2")(0) == 3.0);
    CHECK(test_function("g3")(0) == doctest::Approx(0.7670));
    CHECK(test_function("g4")(-1) == -10.0);
    CHECK(test_function("g4")(0) == -10.0);
    CHECK(test_function("g4")(1) == 10.0);
    CHECK(test_function("g5")(40) == doctest::Approx(std::cos(16.0)));
    CHECK(test_function("g6")(0) == 0.0);
    CHECK_THROWS_AS(test_function("g7"), InputError);
    CHECK(test_function_names().size() == 6);
  }

  TEST_CASE("sampling") {
    const auto p = sample_function("g1", 0, 9, 10);
    CHECK(p.size() == 10);
    CHECK(p.origin == 0.0);
    CHECK(p.spacing == 1.0);
    CHECK(p.at(9) == 81 - 45 + 3);
    CHECK_THROWS_AS(sample_function("g1", 1, 0, 10), InputError);
    CHECK_THROWS_AS(sample_function("g1", 0, 1, 1), InputError);
  }

  TEST_CASE("torus") {
    const auto a = torus_point(2, 5, 0, 0);
    CHECK(a[0] == 7.0);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    const auto b = torus_point(2, 5, 0, std::numbers::pi);
    CHECK(b[0] == doctest::Approx(3.0));
    CHECK(torus_point(2, 5, 1.0, std::numbers::pi / 2)[2] == doctest::Approx(2.0));
    const auto g = torus_grid(2, 5, 8, 12);
    CHECK(g.rows == 8);
    CHECK(g.cols == 12);
    CHECK(g.dim == 3);
    CHECK(g.topology[0] == Topology::closed);
    CHECK(g.topology[1] == Topology::closed);
    CHECK_THROWS_AS(torus_grid(5, 2, 8, 8), InputError);
    CHECK_THROWS_AS(torus_grid(2, 5, 2, 8), InputError);
  }

  TEST_CASE("noise and outliers") {
    const auto p = sample_function("g5", 0, 80, 30);
    CHECK(add_noise(p, {}).values == p.values);
    const auto spiked = add_noise(p, {0.0, 0, {{5, 0, 2.0}}});
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(spiked.at(i) == (i == 5 ? p.at(i) + 2.0 : p.at(i)));
    const auto a = add_noise(p, {0.3, 42, {}});
    const auto b = add_noise(p, {0.3, 42, {}});
    const auto c = add_noise(p, {0.3, 43, {}});
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK_THROWS_AS(add_noise(p, {0.0, 0, {{30, 0, 1.0}}}), InputError);
    CHECK_THROWS_AS(add_noise(p, {-1.0, 0, {}}), InputError);

    const auto g = torus_grid(2, 5, 6, 6);
    const auto gs = add_noise(g, {0.0, 0, {{1, 2, 0.5}}});
    for (std::size_t c2 = 0; c2 < 3; ++c2) CHECK(gs.at(1, 2, c2) == g.at(1, 2, c2) + 0.5);
    CHECK_THROWS_AS(add_noise(g, {0.0, 0, {{1, 6, 0.5}}}), InputError);
  }

  TEST_CASE("gaussian stream is pinned") {
    const auto z = gaussian_stream(12345, 20000);
    double mean = 0.0, var = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.03);
    CHECK(gaussian_stream(12345, 3) == std::vector<double>(z.begin(), z.begin() + 3));
    CHECK(std::string(kRngAlgorithm) == "mt19937_64/box-muller-cos/v1");
  }
}
