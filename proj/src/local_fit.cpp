#include "l1subdiv/local_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "l1subdiv/errors.hpp"

namespace l1subdiv {

std::string to_string(Parity parity) { return parity == Parity::even ? "even" : "odd"; }

Parity parse_parity(const std::string& text) {
  if (text == "even") return Parity::even;
  if (text == "odd") return Parity::odd;
  throw ConfigError("unknown parity '" + text + "' (expected even or odd)");
}

void FitConfig::validate(int max_degree) const {
  if (degree < 1 || degree > max_degree) {
    throw ConfigError("degree must be in 1.." + std::to_string(max_degree) + ", got " +
                      std::to_string(degree));
  }
  if (n < 2) throw ConfigError("stencil half-width n must be >= 2, got " + std::to_string(n));
  if (2 * n < degree + 1) throw ConfigError("stencil too small for the requested degree");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be a positive number");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be a positive number");
  }
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
}

std::array<int, 2> exponents_2d(int a) {
  static constexpr std::array<std::array<int, 2>, 6> kExponents{
      {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};
  return kExponents.at(static_cast<std::size_t>(a));
}

int coefficient_count_2d(int degree) { return (degree + 1) * (degree + 2) / 2; }

std::vector<double> stencil_abscissae(std::size_t length) {
  if (length < 2) throw InputError("stencil needs at least two values");
  const auto n = static_cast<long>(length / 2);
  const long first = length % 2 == 0 ? -n + 1 : -n;
  std::vector<double> r(length);
  for (std::size_t k = 0; k < length; ++k) r[k] = static_cast<double>(first + static_cast<long>(k));
  return r;
}

std::size_t stencil_side(std::size_t count) {
  auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (side * side != count) throw InputError("bivariate stencil is not square");
  return side;
}

namespace {

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " contains a non-finite value");
  }
}

void check_weights(std::span<const double> weights) {
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weights must be positive and finite");
  }
}

void check_shape(std::span<const double> stencil, const FitConfig& cfg) {
  if (stencil.size() != static_cast<std::size_t>(cfg.stencil_size())) {
    throw ConfigError("stencil has " + std::to_string(stencil.size()) + " values, configuration expects " +
                      std::to_string(cfg.stencil_size()));
  }
}

void check_shape_2d(std::span<const double> stencil, const FitConfig& cfg) {
  const auto side = static_cast<std::size_t>(cfg.stencil_size());
  if (stencil.size() != side * side) {
    throw ConfigError("bivariate stencil has " + std::to_string(stencil.size()) +
                      " values, configuration expects " + std::to_string(side * side));
  }
}

double ipow(double x, int e) {
  double out = 1.0;
  for (int k = 0; k < e; ++k) out *= x;
  return out;
}

double max_abs_change(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

double MomentVector::tau(int b1, int b2) const {
  const int span = 2 * degree + 1;
  return values[static_cast<std::size_t>(b1 * span + b2)];
}

MomentVector moments(std::span<const double> weights, int degree) {
  const auto r = stencil_abscissae(weights.size());
  MomentVector m{degree, std::vector<double>(static_cast<std::size_t>(2 * degree + 1), 0.0)};
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double p = weights[k];
    for (auto& v : m.values) {
      v += p;
      p *= r[k];
    }
  }
  return m;
}

MomentVector moments_2d(std::span<const double> weights, int degree) {
  const std::size_t side = stencil_side(weights.size());
  const auto r = stencil_abscissae(side);
  const int span = 2 * degree + 1;
  MomentVector m{degree, std::vector<double>(static_cast<std::size_t>(span * span), 0.0)};
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double w = weights[i * side + j];
      double pr = w;
      for (int b1 = 0; b1 < span; ++b1) {
        double p = pr;
        for (int b2 = 0; b1 + b2 < span; ++b2) {
          m.values[static_cast<std::size_t>(b1 * span + b2)] += p;
          p *= r[j];
        }
        pr *= r[i];
      }
    }
  }
  return m;
}

NormalSystem normal_system(std::span<const double> stencil, std::span<const double> weights,
                           int degree) {
  if (stencil.size() != weights.size()) throw InputError("stencil and weights differ in length");
  if (stencil.size() < static_cast<std::size_t>(degree + 1)) {
    throw ConfigError("stencil too small for the requested degree");
  }
  const int p = degree + 1;
  const MomentVector m = moments(weights, degree);
  const auto r = stencil_abscissae(stencil.size());
  NormalSystem sys{p, std::vector<double>(static_cast<std::size_t>(p * p)),
                   std::vector<double>(static_cast<std::size_t>(p), 0.0)};
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) sys.matrix[static_cast<std::size_t>(a * p + b)] = m.alpha(a + b);
  }
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    double q = weights[k] * stencil[k];
    for (int a = 0; a < p; ++a) {
      sys.rhs[static_cast<std::size_t>(a)] += q;
      q *= r[k];
    }
  }
  return sys;
}

NormalSystem normal_system_2d(std::span<const double> stencil, std::span<const double> weights,
                              int degree) {
  if (stencil.size() != weights.size()) throw InputError("stencil and weights differ in size");
  const int p = coefficient_count_2d(degree);
  const std::size_t side = stencil_side(stencil.size());
  if (stencil.size() < static_cast<std::size_t>(p)) {
    throw ConfigError("stencil too small for the requested degree");
  }
  const MomentVector m = moments_2d(weights, degree);
  const auto r = stencil_abscissae(side);
  NormalSystem sys{p, std::vector<double>(static_cast<std::size_t>(p * p)),
                   std::vector<double>(static_cast<std::size_t>(p), 0.0)};
  for (int a = 0; a < p; ++a) {
    const auto ea = exponents_2d(a);
    for (int b = 0; b < p; ++b) {
      const auto eb = exponents_2d(b);
      sys.matrix[static_cast<std::size_t>(a * p + b)] = m.tau(ea[0] + eb[0], ea[1] + eb[1]);
    }
  }
  // rhs_a = sum r^a1 s^a2 w f
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double wf = weights[i * side + j] * stencil[i * side + j];
      for (int a = 0; a < p; ++a) {
        const auto e = exponents_2d(a);
        sys.rhs[static_cast<std::size_t>(a)] += wf * ipow(r[i], e[0]) * ipow(r[j], e[1]);
      }
    }
  }
  return sys;
}

Solution solve(const NormalSystem& system) {
  const auto p = static_cast<std::size_t>(system.size);
  // Equilibrate: solve (D A D) y = D b, beta = D y with D = diag(A_ii^-1/2).
  std::vector<double> scale(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double d = system.matrix[i * p + i];
    if (!(d > 0.0) || !std::isfinite(d)) throw NumericalError("normal matrix has a non-positive diagonal");
    scale[i] = 1.0 / std::sqrt(d);
  }
  std::vector<double> lu(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) lu[i * p + j] = scale[i] * system.matrix[i * p + j] * scale[j];
  }
  double norm1 = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < p; ++i) col += std::abs(lu[i * p + j]);
    norm1 = std::max(norm1, col);
  }

  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < p; ++i) {
      if (std::abs(lu[i * p + k]) > std::abs(lu[piv * p + k])) piv = i;
    }
    if (lu[piv * p + k] == 0.0) throw NumericalError("normal matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < p; ++j) std::swap(lu[k * p + j], lu[piv * p + j]);
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t i = k + 1; i < p; ++i) {
      const double f = lu[i * p + k] / lu[k * p + k];
      lu[i * p + k] = f;
      for (std::size_t j = k + 1; j < p; ++j) lu[i * p + j] -= f * lu[k * p + j];
    }
  }
  auto lu_solve = [&](const std::vector<double>& b) {
    std::vector<double> x(p);
    for (std::size_t i = 0; i < p; ++i) {
      double s = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu[i * p + j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = p; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < p; ++j) s -= lu[i * p + j] * x[j];
      x[i] = s / lu[i * p + i];
    }
    return x;
  };

  std::vector<double> b(p);
  for (std::size_t i = 0; i < p; ++i) b[i] = scale[i] * system.rhs[i];
  Solution out;
  out.coeffs = lu_solve(b);
  for (std::size_t i = 0; i < p; ++i) out.coeffs[i] *= scale[i];

  double inv_norm1 = 0.0;
  std::vector<double> e(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    e.assign(p, 0.0);
    e[j] = 1.0;
    const auto col = lu_solve(e);
    double sum = 0.0;
    for (double v : col) sum += std::abs(v);
    inv_norm1 = std::max(inv_norm1, sum);
  }
  out.condition = norm1 * inv_norm1;
  out.ill_conditioned = !(out.condition <= kConditionWarning);
  for (double c : out.coeffs) {
    if (!std::isfinite(c)) throw NumericalError("normal-equation solve produced a non-finite value");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Univariate

double eval_poly(const Beta& beta, double r) {
  double v = 0.0;
  for (std::size_t a = beta.coeffs.size(); a-- > 0;) v = v * r + beta.coeffs[a];
  return v;
}

Beta ols_init(std::span<const double> stencil, const FitConfig& cfg) {
  cfg.validate();
  check_shape(stencil, cfg);
  check_finite(stencil, "stencil");
  const std::vector<double> ones(stencil.size(), 1.0);
  return Beta{solve(normal_system(stencil, ones, cfg.degree)).coeffs};
}

WeightVector compute_weights(std::span<const double> stencil, const Beta& beta, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const auto r = stencil_abscissae(stencil.size());
  WeightVector w(stencil.size());
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    const double res = stencil[k] - eval_poly(beta, r[k]);
    w[k] = 1.0 / std::sqrt(res * res + delta);
  }
  return w;
}

Solution wls_solve_checked(std::span<const double> stencil, std::span<const double> weights,
                           int degree) {
  if (degree < 0 || degree > 3) throw ConfigError("degree must be in 0..3");
  check_weights(weights);
  check_finite(stencil, "stencil");
  return solve(normal_system(stencil, weights, degree));
}

Beta wls_solve(std::span<const double> stencil, std::span<const double> weights, int degree) {
  return Beta{wls_solve_checked(stencil, weights, degree).coeffs};
}

double objective(std::span<const double> stencil, const Beta& beta, double delta) {
  const auto r = stencil_abscissae(stencil.size());
  double f = 0.0;
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    const double res = stencil[k] - eval_poly(beta, r[k]);
    f += std::sqrt(res * res + delta);
  }
  return f;
}

FitResult irls_fit(std::span<const double> stencil, const FitConfig& cfg) {
  FitResult out;
  out.beta = ols_init(stencil, cfg);
  out.final_weights.assign(stencil.size(), 1.0);
  out.objective_trace.push_back(objective(stencil, out.beta, cfg.delta));
  if (cfg.constant_weights) {
    // The reweighting map is the identity, so OLS is already the fixed point.
    out.converged = true;
    return out;
  }
  for (int m = 1; m <= cfg.max_iters; ++m) {
    WeightVector w = compute_weights(stencil, out.beta, cfg.delta);
    Solution next = wls_solve_checked(stencil, w, cfg.degree);
    const double change = max_abs_change(next.coeffs, out.beta.coeffs);
    out.beta.coeffs = std::move(next.coeffs);
    out.final_weights = std::move(w);
    out.condition = next.condition;
    out.ill_conditioned = out.ill_conditioned || next.ill_conditioned;
    out.iterations = m;
    out.objective_trace.push_back(objective(stencil, out.beta, cfg.delta));
    if (change < cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bivariate

double eval_poly_2d(const Beta2D& beta, double r, double s) {
  double v = 0.0;
  for (std::size_t a = 0; a < beta.coeffs.size(); ++a) {
    const auto e = exponents_2d(static_cast<int>(a));
    v += beta.coeffs[a] * ipow(r, e[0]) * ipow(s, e[1]);
  }
  return v;
}

Beta2D ols_init_2d(std::span<const double> stencil, const FitConfig& cfg) {
  cfg.validate(2);
  check_shape_2d(stencil, cfg);
  check_finite(stencil, "stencil");
  const std::vector<double> ones(stencil.size(), 1.0);
  return Beta2D{solve(normal_system_2d(stencil, ones, cfg.degree)).coeffs};
}

WeightVector compute_weights_2d(std::span<const double> stencil, const Beta2D& beta, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const std::size_t side = stencil_side(stencil.size());
  const auto r = stencil_abscissae(side);
  WeightVector w(stencil.size());
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double res = stencil[i * side + j] - eval_poly_2d(beta, r[i], r[j]);
      w[i * side + j] = 1.0 / std::sqrt(res * res + delta);
    }
  }
  return w;
}

Solution wls_solve_2d(std::span<const double> stencil, std::span<const double> weights, int degree) {
  if (degree < 0 || degree > 2) throw ConfigError("bivariate degree must be in 0..2");
  check_weights(weights);
  check_finite(stencil, "stencil");
  return solve(normal_system_2d(stencil, weights, degree));
}

double objective_2d(std::span<const double> stencil, const Beta2D& beta, double delta) {
  const std::size_t side = stencil_side(stencil.size());
  const auto r = stencil_abscissae(side);
  double f = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double res = stencil[i * side + j] - eval_poly_2d(beta, r[i], r[j]);
      f += std::sqrt(res * res + delta);
    }
  }
  return f;
}

FitResult2D irls_fit_2d(std::span<const double> stencil, const FitConfig& cfg) {
  FitResult2D out;
  out.beta = ols_init_2d(stencil, cfg);
  out.final_weights.assign(stencil.size(), 1.0);
  out.objective_trace.push_back(objective_2d(stencil, out.beta, cfg.delta));
  if (cfg.constant_weights) {
    out.converged = true;
    return out;
  }
  for (int m = 1; m <= cfg.max_iters; ++m) {
    WeightVector w = compute_weights_2d(stencil, out.beta, cfg.delta);
    Solution next = wls_solve_2d(stencil, w, cfg.degree);
    const double change = max_abs_change(next.coeffs, out.beta.coeffs);
    out.beta.coeffs = std::move(next.coeffs);
    out.final_weights = std::move(w);
    out.condition = next.condition;
    out.ill_conditioned = out.ill_conditioned || next.ill_conditioned;
    out.iterations = m;
    out.objective_trace.push_back(objective_2d(stencil, out.beta, cfg.delta));
    if (change < cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace l1subdiv
