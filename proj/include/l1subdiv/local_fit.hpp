#pragma once

// Local weighted polynomial fitting on uniform stencils.
//
// A univariate stencil holds 2n values at the integer abscissae r = -n+1..n
// (even parity) or 2n+1 values at r = -n..n (odd parity). A bivariate stencil
// is the square tensor grid of those abscissae, stored row-major with r as the
// slow index. The robust fit minimises the smoothed absolute deviation
//
//   F(beta) = sum_r sqrt((f_r - p_beta(r))^2 + delta)
//
// by iteratively reweighted least squares, starting from the ordinary least
// squares solution. The stencil length alone fixes parity and n (2n or 2n+1
// values per axis), so the lower-level routines infer the abscissae from it.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace l1subdiv {

enum class Parity { even, odd };

std::string to_string(Parity parity);
Parity parse_parity(const std::string& text);

/// Configuration of one local fit.
struct FitConfig {
  int degree = 1;
  Parity parity = Parity::even;
  int n = 2;
  double delta = 1e-4;
  double epsilon = 1e-6;
  int max_iters = 6;
  /// Freeze every weight at 1. The fit is then plain least squares and the
  /// scheme it drives is linear.
  bool constant_weights = false;

  /// Throws ConfigError. `max_degree` is 3 for curves and 2 for surfaces.
  void validate(int max_degree = 3) const;

  int stencil_size() const { return parity == Parity::even ? 2 * n : 2 * n + 1; }
  int first_offset() const { return parity == Parity::even ? -n + 1 : -n; }
  int last_offset() const { return n; }
};

/// Univariate coefficients, lowest power first.
struct Beta {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator[](std::size_t a) const { return coeffs[a]; }
};

/// Bivariate coefficients in the order 1, r, s, r^2, rs, s^2.
struct Beta2D {
  std::vector<double> coeffs;

  double operator[](std::size_t a) const { return coeffs[a]; }
};

/// Exponent pair (power of r, power of s) for bivariate coefficient `a`.
std::array<int, 2> exponents_2d(int a);

/// Number of bivariate coefficients for total degree `degree`.
int coefficient_count_2d(int degree);

using WeightVector = std::vector<double>;

/// Weighted power sums. Univariate: alpha_b = sum_r r^b w_r, b = 0..2d.
/// Bivariate: tau(b1, b2) = sum_{r,s} r^b1 s^b2 w_{r,s}, b1 + b2 <= 2d.
struct MomentVector {
  int degree = 0;
  std::vector<double> values;

  double alpha(int b) const { return values[static_cast<std::size_t>(b)]; }
  double tau(int b1, int b2) const;
};

MomentVector moments(std::span<const double> weights, int degree);
MomentVector moments_2d(std::span<const double> weights, int degree);

/// Symmetric weighted normal equations A beta = rhs, stored densely.
struct NormalSystem {
  int size = 0;
  std::vector<double> matrix;  // row-major size x size
  std::vector<double> rhs;

  double at(int i, int j) const { return matrix[static_cast<std::size_t>(i * size + j)]; }
};

NormalSystem normal_system(std::span<const double> stencil, std::span<const double> weights,
                           int degree);
NormalSystem normal_system_2d(std::span<const double> stencil, std::span<const double> weights,
                              int degree);

/// Integer abscissae implied by a univariate stencil (or one bivariate axis)
/// of `length` values.
std::vector<double> stencil_abscissae(std::size_t length);
/// Side length of a square bivariate stencil holding `count` values.
std::size_t stencil_side(std::size_t count);

/// Solution of a NormalSystem with a 1-norm condition number of the
/// diagonally equilibrated matrix.
struct Solution {
  std::vector<double> coeffs;
  double condition = 1.0;
  bool ill_conditioned = false;
};

/// Condition estimates above this attach a warning to the fit.
inline constexpr double kConditionWarning = 1e12;

Solution solve(const NormalSystem& system);

template <class Coeffs>
struct BasicFitResult {
  Coeffs beta;
  int iterations = 0;
  bool converged = false;
  /// Weights of the last weighted solve (all ones when no reweighting ran).
  WeightVector final_weights;
  /// F_delta after the OLS start and after every reweighted solve.
  std::vector<double> objective_trace;
  double condition = 1.0;
  bool ill_conditioned = false;
};

using FitResult = BasicFitResult<Beta>;
using FitResult2D = BasicFitResult<Beta2D>;

Beta ols_init(std::span<const double> stencil, const FitConfig& cfg);
Beta ols_init_closed_form(std::span<const double> stencil, const FitConfig& cfg);
WeightVector compute_weights(std::span<const double> stencil, const Beta& beta, double delta);
Beta wls_solve(std::span<const double> stencil, std::span<const double> weights, int degree);
/// As wls_solve, also reporting the condition estimate.
Solution wls_solve_checked(std::span<const double> stencil, std::span<const double> weights,
                           int degree);
double objective(std::span<const double> stencil, const Beta& beta, double delta);
FitResult irls_fit(std::span<const double> stencil, const FitConfig& cfg);
double eval_poly(const Beta& beta, double r);

Beta2D ols_init_2d(std::span<const double> stencil, const FitConfig& cfg);
Beta2D ols_init_2d_closed_form(std::span<const double> stencil, const FitConfig& cfg);
WeightVector compute_weights_2d(std::span<const double> stencil, const Beta2D& beta, double delta);
Solution wls_solve_2d(std::span<const double> stencil, std::span<const double> weights, int degree);
double objective_2d(std::span<const double> stencil, const Beta2D& beta, double delta);
FitResult2D irls_fit_2d(std::span<const double> stencil, const FitConfig& cfg);
double eval_poly_2d(const Beta2D& beta, double r, double s);

}  // namespace l1subdiv
