// Closed-form ordinary least squares starts for cubic (univariate) and
// quadratic (bivariate) fits on uniform stencils. The lower-degree fits reuse
// the same expressions with the top coefficients pinned to zero: the formulas
// are a back substitution over discrete orthogonal polynomials, so truncating
// them yields exactly the lower-degree least-squares solution.

#include <cmath>

#include "l1subdiv/errors.hpp"
#include "l1subdiv/local_fit.hpp"

namespace l1subdiv {

namespace {

Beta even_cubic(std::span<const double> f, int n, int degree) {
  const double N = n;
  const double N2 = N * N;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    const double r = -n + 1 + k;
    const double fr = f[static_cast<std::size_t>(k)];
    s0 += fr;
    s1 += 3.0 * (2.0 * r - 1.0) / (N * (4.0 * N2 - 1.0)) * fr;
    s2 += 15.0 * (3.0 * r * r - 3.0 * r - N2 + 1.0) / (2.0 * N * (N2 - 1.0) * (4.0 * N2 - 1.0)) * fr;
    s3 += 35.0 * (10.0 * r * r * r - 15.0 * r * r + 11.0 * r - 6.0 * N2 * r + 3.0 * N2 - 3.0) /
          (N * (N2 - 1.0) * (4.0 * N2 - 1.0) * (4.0 * N2 - 9.0)) * fr;
  }
  const double b3 = degree >= 3 ? s3 : 0.0;
  const double b2 = degree >= 2 ? s2 - 1.5 * b3 : 0.0;
  const double b1 = s1 - b2 - (3.0 * N2 + 2.0) / 5.0 * b3;
  const double b0 = s0 / (2.0 * N) - 0.5 * b1 - (2.0 * N2 + 1.0) / 6.0 * b2 - N2 / 2.0 * b3;
  Beta out{{b0, b1, b2, b3}};
  out.coeffs.resize(static_cast<std::size_t>(degree + 1));
  return out;
}

Beta odd_cubic(std::span<const double> f, int n, int degree) {
  const double N = n;
  const double N2 = N * N;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int k = 0; k < 2 * n + 1; ++k) {
    const double r = -n + k;
    const double fr = f[static_cast<std::size_t>(k)];
    s0 += fr;
    s1 += 3.0 * r * fr / (N * (N + 1.0) * (2.0 * N + 1.0));
    s2 += 15.0 * (3.0 * r * r - N2 - N) * fr / (N * (N + 1.0) * (4.0 * N2 - 1.0) * (2.0 * N + 3.0));
    s3 += 35.0 * (5.0 * r * r * r - 3.0 * N2 * r - 3.0 * N * r + r) * fr /
          (N * (N2 - 1.0) * (N + 2.0) * (4.0 * N2 - 1.0) * (2.0 * N + 3.0));
  }
  const double b3 = degree >= 3 ? s3 : 0.0;
  const double b2 = degree >= 2 ? s2 : 0.0;
  const double b1 = s1 - (3.0 * N2 + 3.0 * N - 1.0) / 5.0 * b3;
  const double b0 = s0 / (2.0 * N + 1.0) - N * (N + 1.0) / 3.0 * b2;
  Beta out{{b0, b1, b2, b3}};
  out.coeffs.resize(static_cast<std::size_t>(degree + 1));
  return out;
}

Beta2D even_quadratic_2d(std::span<const double> f, int n, int degree) {
  const double N = n;
  const double N2 = N * N;
  const int side = 2 * n;
  double sum = 0.0, sr = 0.0, ss = 0.0, srr = 0.0, srs = 0.0, sss = 0.0;
  for (int i = 0; i < side; ++i) {
    const double r = -n + 1 + i;
    for (int j = 0; j < side; ++j) {
      const double s = -n + 1 + j;
      const double v = f[static_cast<std::size_t>(i * side + j)];
      sum += v;
      sr += 3.0 * (2.0 * r - 1.0) / (2.0 * N2 * (4.0 * N2 - 1.0)) * v;
      ss += 3.0 * (2.0 * s - 1.0) / (2.0 * N2 * (4.0 * N2 - 1.0)) * v;
      sss += -15.0 * (3.0 * s - 1.0 - 3.0 * s * s + N2) / (4.0 * N2 * (N2 - 1.0) * (4.0 * N2 - 1.0)) * v;
      srs += 9.0 * (4.0 * r * s + 1.0 - 2.0 * r - 2.0 * s) /
             (N2 * (4.0 * N2 - 1.0) * (4.0 * N2 - 1.0)) * v;
      srr += -15.0 * (N2 + 3.0 * r - 3.0 * r * r - 1.0) / (4.0 * N2 * (N2 - 1.0) * (4.0 * N2 - 1.0)) * v;
    }
  }
  const bool quad = degree >= 2;
  const double b5 = quad ? sss : 0.0;
  const double b4 = quad ? srs : 0.0;
  const double b3 = quad ? srr : 0.0;
  const double b2 = ss - 0.5 * b4 - b5;
  const double b1 = sr - b3 - 0.5 * b4;
  const double b0 = sum / (4.0 * N2) - 0.5 * b1 - 0.5 * b2 - (2.0 * N2 + 1.0) / 6.0 * b3 - 0.25 * b4 -
                    (2.0 * N2 + 1.0) / 6.0 * b5;
  Beta2D out{{b0, b1, b2, b3, b4, b5}};
  out.coeffs.resize(static_cast<std::size_t>(coefficient_count_2d(degree)));
  return out;
}

Beta2D odd_quadratic_2d(std::span<const double> f, int n, int degree) {
  const double N = n;
  const double N2 = N * N;
  const int side = 2 * n + 1;
  const double sq = (2.0 * N + 1.0) * (2.0 * N + 1.0);
  const double quad_den = N * (N + 1.0) * (2.0 * N - 1.0) * sq * (2.0 * N + 3.0);
  const double lin_den = N * (N + 1.0) * sq;
  double sum = 0.0, sr = 0.0, ss = 0.0, srr = 0.0, srs = 0.0, sss = 0.0;
  for (int i = 0; i < side; ++i) {
    const double r = -n + i;
    for (int j = 0; j < side; ++j) {
      const double s = -n + j;
      const double v = f[static_cast<std::size_t>(i * side + j)];
      sum += v;
      sr += 3.0 * r / lin_den * v;
      ss += 3.0 * s / lin_den * v;
      sss += -15.0 * (N2 + N - 3.0 * s * s) / quad_den * v;
      srs += 9.0 * r * s / (N2 * (N + 1.0) * (N + 1.0) * sq) * v;
      srr += -15.0 * (N2 + N - 3.0 * r * r) / quad_den * v;
    }
  }
  const bool quad = degree >= 2;
  const double b5 = quad ? sss : 0.0;
  const double b4 = quad ? srs : 0.0;
  const double b3 = quad ? srr : 0.0;
  const double b0 = sum / sq - N * (N + 1.0) / 3.0 * b3 - N * (N + 1.0) / 3.0 * b5;
  Beta2D out{{b0, sr, ss, b3, b4, b5}};
  out.coeffs.resize(static_cast<std::size_t>(coefficient_count_2d(degree)));
  return out;
}

}  // namespace

Beta ols_init_closed_form(std::span<const double> stencil, const FitConfig& cfg) {
  cfg.validate();
  if (stencil.size() != static_cast<std::size_t>(cfg.stencil_size())) {
    throw ConfigError("stencil length does not match the configuration");
  }
  // The even-parity cubic denominators vanish at n = 1 and the constant term
  // needs n >= 2; FitConfig::validate already enforces n >= 2.
  return cfg.parity == Parity::even ? even_cubic(stencil, cfg.n, cfg.degree)
                                    : odd_cubic(stencil, cfg.n, cfg.degree);
}

Beta2D ols_init_2d_closed_form(std::span<const double> stencil, const FitConfig& cfg) {
  cfg.validate(2);
  const auto side = static_cast<std::size_t>(cfg.stencil_size());
  if (stencil.size() != side * side) {
    throw ConfigError("bivariate stencil size does not match the configuration");
  }
  return cfg.parity == Parity::even ? even_quadratic_2d(stencil, cfg.n, cfg.degree)
                                    : odd_quadratic_2d(stencil, cfg.n, cfg.degree);
}

}  // namespace l1subdiv
