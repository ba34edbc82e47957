#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../oracle/oracle.hpp"
#include "l1subdiv/datagen.hpp"
#include "l1subdiv/errors.hpp"
#include "l1subdiv/refine1d.hpp"
#include "l1subdiv/refine2d.hpp"

using namespace l1subdiv;

namespace {

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double scale = 1.0, m = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / scale;
}

ControlPolygon random_polygon(std::mt19937_64& rng, std::size_t len, std::size_t dim = 1) {
  std::uniform_real_distribution<double> u(-5, 5);
  ControlPolygon p;
  p.dim = dim;
  p.values.resize(len * dim);
  for (auto& v : p.values) v = u(rng);
  return p;
}

GridMesh random_mesh(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t dim = 1) {
  std::uniform_real_distribution<double> u(-5, 5);
  GridMesh m;
  m.rows = rows;
  m.cols = cols;
  m.dim = dim;
  m.values.resize(rows * cols * dim);
  for (auto& v : m.values) v = u(rng);
  return m;
}

}  // namespace

TEST_SUITE("refine1d") {
  TEST_CASE("abscissae") {
    CHECK(abscissae(Parity::even, 2) == std::vector<double>{0.25, 0.75});
    CHECK(abscissae(Parity::odd, 2) == std::vector<double>{-0.25, 0.25});
    const auto three = abscissae(Parity::even, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0] == doctest::Approx(1.0 / 6));
    CHECK(three[1] == doctest::Approx(0.5));
    CHECK(three[2] == doctest::Approx(5.0 / 6));
    CHECK(abscissae(Parity::odd, 4) == std::vector<double>{-0.375, -0.125, 0.125, 0.375});
    CHECK_THROWS_AS(abscissae(Parity::odd, 3), UnsupportedError);
    CHECK_THROWS_AS(abscissae(Parity::even, 1), ConfigError);
  }

  TEST_CASE("scheme construction") {
    const auto s10 = make_scheme(10, 3);
    CHECK(s10.fit.n == 5);
    CHECK(s10.fit.parity == Parity::even);
    const auto s11 = make_scheme(11, 2);
    CHECK(s11.fit.n == 5);
    CHECK(s11.fit.parity == Parity::odd);
    CHECK(s11.points() == 11);
    CHECK(scheme_name(s10) == "D_{10,3}");
    CHECK(parse_boundary("mirror") == BoundaryPolicy::mirror);
    CHECK_THROWS_AS(parse_boundary("wrap"), ConfigError);
  }

  TEST_CASE("constant polygons stay constant") {
    for (int h : {4, 5, 10, 11}) {
      for (int d = 1; d <= 3; ++d) {
        if (h < d + 1) continue;
        const auto p = ControlPolygon::scalar(std::vector<double>(20, 3.25));
        const auto out = refine_once(p, make_scheme(h, d));
        for (double v : out.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("linear data and parameter tracking") {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(i);
    const auto p = ControlPolygon::scalar(v);
    const auto out = refine_once(p, make_scheme(4, 1));
    // Centers 1..8 with even n=2 stencils; new points at i+1/4, i+3/4.
    REQUIRE(out.size() == 14);
    CHECK(out.level == 1);
    CHECK(out.spacing == 0.5);
    CHECK(out.origin == 1.25);
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out.at(k) == doctest::Approx(out.param(k)).epsilon(1e-12));
  }

  TEST_CASE("step data: cubic overshoots, linear does not") {
    std::vector<double> v;
    for (int i = -12; i < 12; ++i) v.push_back(i < 0 ? -10.0 : 10.0);
    const auto p = ControlPolygon::scalar(v, -12.0);
    const auto cubic = refine_once(p, make_scheme(10, 3));
    const auto line = refine_once(p, make_scheme(10, 1));
    CHECK(*std::max_element(cubic.values.begin(), cubic.values.end()) > 10.0);
    CHECK(*std::max_element(line.values.begin(), line.values.end()) <= 10.0 + 1e-12);
  }

  TEST_CASE("subdivide examples") {
    const auto p = sample_function("g2", -3, 3, 30);
    CHECK(subdivide(p, make_scheme(10, 3), 0).values == p.values);
    const auto out = subdivide(p, make_scheme(10, 3), 4);
    const auto g2 = test_function("g2");
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(std::abs(out.at(k) - g2(out.param(k))) <= 1e-8);

    const auto q = sample_function("g1", -2, 7, 30);
    const auto lin = subdivide(q, make_scheme(10, 1), 4);
    const auto g1 = test_function("g1");
    double worst = 0.0;
    for (std::size_t k = 0; k < lin.size(); ++k) worst = std::max(worst, std::abs(lin.at(k) - g1(lin.param(k))));
    CHECK(worst > 1e-3);
    CHECK_THROWS_AS(subdivide(q, make_scheme(10, 1), -1), ConfigError);
  }

  TEST_CASE("degree reproduction for every family") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int h = 4; h <= 11; ++h) {
      for (int d = 1; d <= 3; ++d) {
        std::vector<double> beta(static_cast<std::size_t>(d + 1));
        for (auto& b : beta) b = u(rng);
        std::vector<double> v;
        for (int i = 0; i < 24; ++i) v.push_back(oracle::poly(beta, i));
        const auto out = subdivide(ControlPolygon::scalar(v), make_scheme(h, d), 2);
        for (std::size_t k = 0; k < out.size(); ++k) {
          CHECK(std::abs(out.at(k) - oracle::poly(beta, out.param(k))) <= 1e-9 * (1 + std::abs(out.at(k))));
        }
      }
    }
  }

  TEST_CASE("boundary policies") {
    std::mt19937_64 rng(67);
    auto p = random_polygon(rng, 12);
    const auto spec = make_scheme(5, 2);
    CHECK(refine_once(p, spec).size() == 2 * (12 - 5 + 1));
    auto periodic = spec;
    periodic.boundary = BoundaryPolicy::periodic;
    CHECK(refine_once(p, periodic).size() == 24);
    auto mirror = spec;
    mirror.boundary = BoundaryPolicy::mirror;
    CHECK(refine_once(p, mirror).size() == 24);
    p.topology = Topology::closed;
    CHECK(refine_once(p, spec).values == refine_once(p, periodic).values);
    CHECK_THROWS_AS(refine_once(random_polygon(rng, 4), spec), InputError);
  }

  TEST_CASE("periodic refinement is shift-equivariant") {
    std::mt19937_64 rng(71);
    auto p = random_polygon(rng, 16);
    p.topology = Topology::closed;
    auto rotated = p;
    std::rotate(rotated.values.begin(), rotated.values.begin() + 3, rotated.values.end());
    const auto spec = make_scheme(6, 2);
    auto a = refine_once(p, spec).values;
    const auto b = refine_once(rotated, spec).values;
    std::rotate(a.begin(), a.begin() + 6, a.end());
    CHECK(max_rel_diff(a, b) <= 1e-12);
  }

  TEST_CASE("affine invariance") {
    std::mt19937_64 rng(73);
    for (int h : {6, 7}) {
      for (int d = 1; d <= 3; ++d) {
        const auto p = random_polygon(rng, 20);
        auto spec = make_scheme(h, d);
        const auto base = refine_once(p, spec).values;
        auto q = p;
        for (auto& v : q.values) v = 3.0 * v - 2.0;
        auto scaled = spec;
        scaled.fit.delta *= 9.0;
        auto out = refine_once(q, scaled).values;
        for (auto& v : out) v = (v + 2.0) / 3.0;
        CHECK(max_rel_diff(out, base) <= 1e-9);
      }
    }
  }

  TEST_CASE("reversal symmetry") {
    std::mt19937_64 rng(79);
    for (int h : {6, 7, 10, 11}) {
      for (int d = 1; d <= 3; ++d) {
        const auto p = random_polygon(rng, 24);
        auto r = p;
        std::reverse(r.values.begin(), r.values.end());
        const auto spec = make_scheme(h, d);
        auto fwd = refine_once(p, spec).values;
        const auto back = refine_once(r, spec).values;
        std::reverse(fwd.begin(), fwd.end());
        CHECK(max_rel_diff(fwd, back) <= 1e-10);
      }
    }
  }

  TEST_CASE("vector data is fitted componentwise") {
    std::mt19937_64 rng(83);
    const auto p = random_polygon(rng, 15, 2);
    const auto spec = make_scheme(6, 2);
    const auto both = refine_once(p, spec);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto one = refine_once(ControlPolygon::scalar(p.component(c)), spec);
      CHECK(both.component(c) == one.values);
    }
  }

  TEST_CASE("parallel output is bitwise identical") {
    std::mt19937_64 rng(89);
    const auto p = random_polygon(rng, 64);
    for (int h : {10, 11}) {
      const auto spec = make_scheme(h, 3);
      RefineStats s1, s4;
      const auto a = subdivide(p, spec, 2, {1, &s1});
      const auto b = subdivide(p, spec, 2, {4, &s4});
      const auto c = subdivide(p, spec, 2, {0, nullptr});
      CHECK(a.values == b.values);
      CHECK(a.values == c.values);
      CHECK(s1.fits == s4.fits);
      CHECK(s1.iterations == s4.iterations);
    }
  }

  TEST_CASE("ternary refinement reproduces lines") {
    std::vector<double> v;
    for (int i = 0; i < 12; ++i) v.push_back(2.0 * i - 1.0);
    auto spec = make_scheme(6, 1);
    spec.arity = 3;
    const auto out = refine_once(ControlPolygon::scalar(v), spec);
    CHECK(out.spacing == doctest::Approx(1.0 / 3));
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out.at(k) == doctest::Approx(2.0 * out.param(k) - 1.0));
  }

  TEST_CASE("closed-form d=1 masks") {
    const auto masks = masks_d1_closed_form(std::vector<double>{1, 1, 1, 1}, Parity::even);
    REQUIRE(masks.size() == 2);
    const std::vector<double> expect{0.325, 0.275, 0.225, 0.175};
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(masks[0].coeffs[k] == doctest::Approx(expect[k]).epsilon(1e-12));
      CHECK(masks[1].coeffs[k] == doctest::Approx(expect[3 - k]).epsilon(1e-12));
    }
    CHECK(masks[0].sum() == doctest::Approx(1.0));
    CHECK(masks[1].sum() == doctest::Approx(1.0));
  }

  TEST_CASE("closed-form d=2 masks reproduce quadratics") {
    for (auto parity : {Parity::even, Parity::odd}) {
      const std::size_t len = parity == Parity::even ? 6 : 7;
      const auto masks = masks_d2_closed_form(std::vector<double>(len, 1.0), parity);
      std::vector<double> sq;
      for (double r : oracle::offsets(len)) sq.push_back(r * r);
      for (const auto& m : masks) CHECK(m.apply(sq) == doctest::Approx(m.abscissa * m.abscissa).epsilon(1e-12));
      const auto generic = generic_masks(std::vector<double>(len, 1.0), 2, parity);
      for (std::size_t a = 0; a < masks.size(); ++a) CHECK(max_rel_diff(masks[a].coeffs, generic[a].coeffs) <= 1e-10);
    }
  }

  TEST_CASE("closed-form masks agree with the generic path on random weights") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> uw(0.05, 20.0);
    for (int n = 2; n <= 5; ++n) {
      for (auto parity : {Parity::even, Parity::odd}) {
        const std::size_t len = static_cast<std::size_t>(parity == Parity::even ? 2 * n : 2 * n + 1);
        for (int t = 0; t < 40; ++t) {
          std::vector<double> w(len), f(len);
          for (auto& x : w) x = uw(rng);
          for (auto& x : f) x = uw(rng) - 10.0;
          for (int d : {1, 2}) {
            const auto closed = d == 1 ? masks_d1_closed_form(w, parity) : masks_d2_closed_form(w, parity);
            const auto generic = generic_masks(w, d, parity);
            const auto beta = oracle::brute_ls(f, w, d);
            for (std::size_t a = 0; a < closed.size(); ++a) {
              CHECK(closed[a].sum() == doctest::Approx(1.0).epsilon(1e-12));
              CHECK(max_rel_diff(closed[a].coeffs, generic[a].coeffs) <= 1e-10);
              const double ref = oracle::poly(beta, closed[a].abscissa);
              CHECK(std::abs(closed[a].apply(f) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
            }
          }
        }
      }
    }
    CHECK_THROWS_AS(masks_d1_closed_form(std::vector<double>{1, -1, 1, 1}, Parity::even), DomainError);
  }

  TEST_CASE("constant-weight masks") {
    auto spec = make_scheme(4, 1);
    const auto m = constant_weight_mask(spec);
    REQUIRE(m.size() == 2);
    const std::vector<double> expect{0.325, 0.275, 0.225, 0.175};
    for (std::size_t k = 0; k < 4; ++k) CHECK(m[0].coeffs[k] == doctest::Approx(expect[k]).epsilon(1e-12));

    const auto odd = constant_weight_mask(make_scheme(5, 1));
    auto rev = odd[0].coeffs;
    std::reverse(rev.begin(), rev.end());
    CHECK(max_rel_diff(rev, odd[1].coeffs) <= 1e-12);

    for (int h : {6, 7, 10, 11}) {
      for (int d = 1; d <= 3; ++d) {
        for (const auto& mask : constant_weight_mask(make_scheme(h, d))) {
          CHECK(mask.sum() == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(max_rel_diff(mask.coeffs, oracle::ols_mask(static_cast<std::size_t>(h), d, mask.abscissa)) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("constant weights make the scheme linear") {
    std::mt19937_64 rng(101);
    for (int h : {6, 7}) {
      auto spec = make_scheme(h, 2);
      spec.fit.constant_weights = true;
      const auto a = random_polygon(rng, 20);
      const auto b = random_polygon(rng, 20);
      auto sum = a;
      for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] += b.values[k];
      const auto ra = refine_once(a, spec).values;
      const auto rb = refine_once(b, spec).values;
      const auto rs = refine_once(sum, spec).values;
      for (std::size_t k = 0; k < rs.size(); ++k) CHECK(std::abs(rs[k] - ra[k] - rb[k]) <= 1e-12 * 10);
    }
  }
}

TEST_SUITE("refine2d") {
  TEST_CASE("abscissae") {
    const auto e = abscissae_2d(Parity::even);
    REQUIRE(e.size() == 4);
    CHECK(e[0] == std::array<double, 2>{0.25, 0.25});
    CHECK(e[1] == std::array<double, 2>{0.75, 0.25});
    CHECK(e[2] == std::array<double, 2>{0.25, 0.75});
    CHECK(e[3] == std::array<double, 2>{0.75, 0.75});
    const auto o = abscissae_2d(Parity::odd);
    CHECK(o[0] == std::array<double, 2>{-0.25, -0.25});
    CHECK(o[3] == std::array<double, 2>{0.25, 0.25});
  }

  TEST_CASE("constant, bilinear and quadratic data") {
    SchemeSpec2D spec{make_scheme(4, 1).fit};
    GridMesh m;
    m.rows = 8;
    m.cols = 9;
    m.values.assign(72, -1.5);
    for (double v : refine_once_2d(m, spec).values) CHECK(v == doctest::Approx(-1.5).epsilon(1e-12));

    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = static_cast<double>(i + j);
    }
    const auto lin = refine_once_2d(m, spec);
    CHECK(lin.rows == 2 * (8 - 4 + 1));
    CHECK(lin.cols == 2 * (9 - 4 + 1));
    for (std::size_t i = 0; i < lin.rows; ++i) {
      for (std::size_t j = 0; j < lin.cols; ++j) {
        CHECK(lin.at(i, j) == doctest::Approx(lin.param(0, i) + lin.param(1, j)).epsilon(1e-12));
      }
    }

    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = static_cast<double>(i * i);
    }
    for (int h : {4, 5}) {
      SchemeSpec2D q{make_scheme(h, 2).fit};
      const auto out = refine_once_2d(m, q);
      for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t j = 0; j < out.cols; ++j) {
          const double u = out.param(0, i);
          CHECK(out.at(i, j) == doctest::Approx(u * u).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("levels=0 and undersized meshes") {
    std::mt19937_64 rng(103);
    const auto m = random_mesh(rng, 6, 6);
    SchemeSpec2D spec{make_scheme(4, 2).fit};
    CHECK(subdivide_2d(m, spec, 0).values == m.values);
    CHECK_THROWS_AS(refine_once_2d(random_mesh(rng, 3, 6), spec), InputError);
    SchemeSpec2D cubic{make_scheme(4, 3).fit};
    CHECK_THROWS_AS(refine_once_2d(m, cubic), ConfigError);
  }

  TEST_CASE("transpose commutes with refinement") {
    std::mt19937_64 rng(107);
    for (int h : {4, 5}) {
      for (int d : {1, 2}) {
        const auto m = random_mesh(rng, 9, 11);
        SchemeSpec2D spec{make_scheme(h, d).fit};
        const auto a = refine_once_2d(m, spec).transposed();
        const auto b = refine_once_2d(m.transposed(), spec);
        CHECK(a.rows == b.rows);
        CHECK(max_rel_diff(a.values, b.values) <= 1e-10);
      }
    }
  }

  TEST_CASE("componentwise consistency and parallel determinism") {
    std::mt19937_64 rng(109);
    auto m = random_mesh(rng, 10, 10, 3);
    m.topology = {Topology::closed, Topology::open};
    SchemeSpec2D spec{make_scheme(4, 2).fit};
    const auto all = refine_once_2d(m, spec, {1, nullptr});
    CHECK(refine_once_2d(m, spec, {3, nullptr}).values == all.values);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(refine_once_2d(m.component(c), spec).values == all.component(c).values);
    }
  }

  TEST_CASE("constant weights match the bivariate least-squares oracle") {
    std::mt19937_64 rng(113);
    for (int h : {4, 5}) {
      for (int d : {1, 2}) {
        auto fit = make_scheme(h, d).fit;
        fit.constant_weights = true;
        SchemeSpec2D spec{fit};
        const auto m = random_mesh(rng, static_cast<std::size_t>(h), static_cast<std::size_t>(h));
        const auto out = refine_once_2d(m, spec);
        REQUIRE(out.rows == 2);
        const auto ab = abscissae_2d(fit.parity);
        for (std::size_t q = 0; q < 4; ++q) {
          const auto mask = oracle::ols_mask_2d(static_cast<std::size_t>(h), d, ab[q][0], ab[q][1]);
          double v = 0.0;
          for (std::size_t k = 0; k < mask.size(); ++k) v += mask[k] * m.values[k];
          CHECK(std::abs(out.at(q % 2, q / 2) - v) <= 1e-10 * std::max(1.0, std::abs(v)));
        }
      }
    }
  }

  TEST_CASE("clean torus refinement improves on the input discretisation") {
    const auto t = torus_grid(2.0, 5.0, 24, 24);
    SchemeSpec2D spec{make_scheme(4, 2).fit};
    const auto out = subdivide_2d(t, spec, 2);
    CHECK(out.rows == 96);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.rows; ++i) {
      for (std::size_t j = 0; j < out.cols; ++j) {
        const auto p = torus_point(2.0, 5.0, out.param(0, i), out.param(1, j));
        for (std::size_t c = 0; c < 3; ++c) sum += (out.at(i, j, c) - p[c]) * (out.at(i, j, c) - p[c]);
      }
    }
    const double rms = std::sqrt(sum / (96.0 * 96.0));
    // Quadratic fits leave an O(h^3) error on the curved surface.
    CHECK(rms < 0.05);
  }

  TEST_CASE("noisy torus error drops over two levels") {
    const auto clean = torus_grid(2.0, 5.0, 24, 24);
    const auto noisy = add_noise(clean, {0.05, 4, {{3, 5, 0.8}, {15, 17, -0.8}}});
    auto rms = [](const GridMesh& m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
          const auto p = torus_point(2.0, 5.0, m.param(0, i), m.param(1, j));
          for (std::size_t c = 0; c < 3; ++c) sum += (m.at(i, j, c) - p[c]) * (m.at(i, j, c) - p[c]);
        }
      }
      return std::sqrt(sum / static_cast<double>(m.rows * m.cols));
    };
    SchemeSpec2D spec{make_scheme(4, 2).fit};
    const auto l1 = refine_once_2d(noisy, spec);
    const auto l2 = refine_once_2d(l1, spec);
    CHECK(rms(l1) < rms(noisy));
    CHECK(rms(l2) < rms(l1));
  }
}
