#pragma once

#include <functional>
#include <random>
#include <vector>

#include "cone/bessel.hpp"

namespace cone {

struct KernelParams {
  Algebra alg;
  double lambda = 1.0;
  cd t = 1.0;

  // Checks lambda > n/r - 1, Re t >= 0 and |sinh t| > 1e-8.
  void validate() const;
  double u() const { return t.real(); }
  double v() const { return t.imag(); }
};

// sinh u / (cosh u + |cos v|), the decay rate in tr x + tr y.
double decay_exponent(cd t);

// K(x,y;t) = e^{-coth t (tr x + tr y)} I_lambda(sinh^{-2} t P(x^{1/2}) y).
EvalResult kernel_K(const KernelParams& p, const Element& x, const Element& y, const SeriesOptions& opt = {});

struct Growth {
  enum class Kind { Bounded, Polynomial, Exponential };
  Kind kind = Kind::Bounded;
  double rate = 0.0;  // degree p, or a in |phi| <= C e^{a tr y}

  static Growth bounded() { return {}; }
  static Growth polynomial(double p) { return {Kind::Polynomial, p}; }
  static Growth exponential(double a) { return {Kind::Exponential, a}; }
};

// K_L-invariant function on the cone, given on descending eigenvalues.
struct RadialFunction {
  std::function<cd(const Eigen::VectorXd&)> f;
  Growth growth;

  cd operator()(const Eigen::VectorXd& t) const { return f(t); }
};

// Product exp-sinh rule on the eigenvalue increments t_r, t_{r-1} - t_r, ...; weights carry the density
// prod_{i<j} (t_i - t_j)^d and the constant c_Omega, so sum w f(t) approximates the integral over the cone.
class ConeQuadrature {
 public:
  ConeQuadrature(const Algebra& a, int level, double scale, double range);

  const Algebra& algebra() const { return alg_; }
  const std::vector<Eigen::VectorXd>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  int level() const { return level_; }

  // Calibrated so that the Gindikin integral at lambda = n/r is exact; verified at n/r + 1.
  static double c_omega(const Algebra& a);
  // Relative mismatch of the cross-check at n/r + 1.
  static double calibration_error(const Algebra& a);

 private:
  Algebra alg_;
  int level_;
  std::vector<Eigen::VectorXd> nodes_;
  std::vector<double> weights_;
};

// exp-sinh abscissas and weights on (0, inf) with step 2^-level, scaled by `scale`, up to `range`.
void exp_sinh_rule(int level, double scale, double range, std::vector<double>& x, std::vector<double>& w);

// G(a, b) = sum_m C_m(a) C_m(b) / (|m|! (lambda)_m C_m(e)), the K_L average of I_lambda(P(a^{1/2}) k b).
// Rows follow `as`, columns `bs`. The tail is below rel_tol * exp(floor_a[i] + floor_b[j]).
Eigen::MatrixXcd averaged_0F1(const Algebra& a, double lambda, const std::vector<Eigen::VectorXcd>& as,
                              const std::vector<Eigen::VectorXcd>& bs, const std::vector<double>& floor_a,
                              const std::vector<double>& floor_b, double rel_tol = 1e-13,
                              int max_weight = 3000);

// Kernel of tau_lambda(t) on eigenvalues: sinh^{-r lambda} t e^{-coth t (tr x + tr y)} G(x / sinh^2 t, y).
// Entries carry an absolute error of about rel_tol |sinh t|^{-r lambda}.
Eigen::MatrixXcd radial_kernel(const KernelParams& p, const std::vector<Eigen::VectorXd>& xs,
                               const std::vector<Eigen::VectorXd>& ys, double rel_tol = 1e-13);

struct TauOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int min_level = 0;  // 0: 3 for r = 1, 2 otherwise
  std::size_t max_nodes = std::size_t(1) << 20;
};

// tau_lambda(t) phi at each grid point (descending eigenvalues); error is the change from the previous level.
std::vector<EvalResult> tau_apply(const KernelParams& p, const RadialFunction& phi,
                                  const std::vector<Eigen::VectorXd>& grid, const TauOptions& opt = {});
EvalResult tau_apply(const KernelParams& p, const RadialFunction& phi, const Element& x, const TauOptions& opt = {});

struct SemigroupRow {
  Eigen::VectorXd x;
  cd composed = 0.0;
  cd direct = 0.0;
};

struct SemigroupReport {
  double discrepancy = 0.0;  // sup |tau(s) tau(t) phi - tau(s+t) phi| / sup |tau(s+t) phi|
  double quadrature_error = 0.0;
  double sup_direct = 0.0;
  int level = 0;
  std::size_t nodes = 0;
  std::vector<SemigroupRow> rows;
};

SemigroupReport semigroup_check(const Algebra& a, double lambda, cd s, cd t, const RadialFunction& phi,
                                const std::vector<Eigen::VectorXd>& grid, const TauOptions& opt = {});

struct KernelBoundRow {
  double tr_x = 0.0;
  double tr_y = 0.0;
  double abs_k = 0.0;
  double envelope = 0.0;  // (1 + (tr x tr y)^{rk/2}) e^{-kappa (tr x + tr y)}
  double ratio = 0.0;
};

struct KernelBoundReport {
  double kappa = 0.0;
  double c_star = 0.0;
  double validation_max = 0.0;
  int calibration_count = 0;
  int validation_count = 0;
  int violations = 0;
  std::vector<KernelBoundRow> calibration;
  std::vector<KernelBoundRow> validation;
};

KernelBoundReport kernel_bound_check(const KernelParams& p, int k, int sample_count, std::mt19937_64& rng,
                                     double max_trace = 50.0);

// (1/Gamma(lambda)) int_0^inf phi(y) J_lambda(x y) y^{lambda-1} dy on V = R, truncated at `horizon`.
// horizon <= 0: the first y = 2^k >= 8 past which |phi| y^lambda stays below 1e-18 of its peak.
cd hankel_V_R(double lambda, const std::function<cd(double)>& phi, double x, double rel_tol = 1e-10,
              double horizon = 0.0);
cd hankel_V_R(const Algebra& a, double lambda, const std::function<cd(double)>& phi, double x,
              double rel_tol = 1e-10, double horizon = 0.0);

struct MehlerRow {
  double x = 0.0;  // |xi|^2 / 2
  cd hermite = 0.0;
  cd tau = 0.0;
};

struct MehlerReport {
  double discrepancy = 0.0;  // sup |hermite - tau| / sup |tau|
  std::vector<MehlerRow> rows;
};

// Hermite semigroup on radial f(xi) = F(|xi|^2 / 2) in R^N against tau_{N/2}(t) F on V = R.
MehlerReport mehler_radial_check(int N, cd t, const std::function<cd(double)>& F, Growth growth,
                                 const std::vector<double>& grid);

}  // namespace cone
