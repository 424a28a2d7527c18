#include "cone/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "cone/jack.hpp"
#include "cone/jordan.hpp"

namespace cone {

int weight(const Partition& m) { return std::accumulate(m.begin(), m.end(), 0); }

namespace {

void fill_parts(int r, int remaining, int cap, Partition& cur, std::vector<Partition>& out) {
  const int pos = int(cur.size());
  if (pos == r) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  for (int v = std::min(cap, remaining); v >= 0; --v) {
    if (v * (r - pos) < remaining) break;
    cur.push_back(v);
    fill_parts(r, remaining - v, v, cur, out);
    cur.pop_back();
  }
}

bool colex_less(const Partition& a, const Partition& b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

}  // namespace

std::vector<Partition> partitions_of(int r, int k) {
  std::vector<Partition> out;
  Partition cur;
  fill_parts(r, k, k, cur, out);
  std::sort(out.begin(), out.end(), colex_less);
  return out;
}

std::vector<Partition> partitions_upto(int r, int K) {
  std::vector<Partition> out;
  for (int k = 0; k <= K; ++k) {
    auto level = partitions_of(r, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

cd poch(cd s, int m) {
  cd acc = 1.0;
  for (int i = 0; i < m; ++i) acc *= s + double(i);
  return acc;
}

cd poch_general(const Eigen::VectorXcd& s, const std::vector<int>& m, int d) {
  cd acc = 1.0;
  for (size_t j = 0; j < m.size(); ++j) acc *= poch(s(j) - double(j) * d / 2.0, m[j]);
  return acc;
}

cd poch_general(cd s, const std::vector<int>& m, int d) {
  return poch_general(Eigen::VectorXcd::Constant(Eigen::Index(m.size()), s), m, d);
}

namespace {

bool near_pole(cd z) {
  return std::abs(z.imag()) < 1e-8 && z.real() < 0.5 && std::abs(z.real() - std::round(z.real())) < 1e-8;
}

}  // namespace

cd complex_lgamma(cd z) {
  if (near_pole(z)) throw MathError(ErrorCode::PoleHit, "Gamma has a pole near " + std::to_string(z.real()));
  if (z.imag() == 0.0 && z.real() > 0) return std::lgamma(z.real());
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  gsl_sf_result lnr, arg;
  if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != GSL_SUCCESS)
    throw MathError(ErrorCode::PoleHit, "log Gamma failed");
  return {lnr.val, arg.val};
}

cd gindikin_gamma_log(const Eigen::VectorXcd& s, const Algebra& a) {
  if (s.size() != a.r) throw MathError(ErrorCode::AlgebraMismatch, "Gamma_Omega needs r arguments");
  cd acc = 0.5 * (a.n - a.r) * std::log(2 * M_PI);
  for (int j = 0; j < a.r; ++j) acc += complex_lgamma(s(j) - double(j) * a.d / 2.0);
  return acc;
}

cd gindikin_gamma_log(cd s, const Algebra& a) {
  return gindikin_gamma_log(Eigen::VectorXcd::Constant(a.r, s), a);
}

cd c_lambda(cd lambda, const Algebra& a) {
  return std::exp(gindikin_gamma_log(lambda, a) - gindikin_gamma_log(lambda - a.n_over_r(), a) -
                  double(a.n) * std::log(M_PI));
}

namespace {

cd jack_eval(JackTable<double>& tab, const Partition& m, const Eigen::VectorXcd& points, int max_weight) {
  const int k = weight(m);
  if (k > max_weight)
    throw MathError(ErrorCode::WeightTooLarge,
                    "partition weight " + std::to_string(k) + " exceeds " + std::to_string(max_weight));
  if (int(m.size()) != tab.r() || int(points.size()) != tab.r())
    throw MathError(ErrorCode::AlgebraMismatch, "partition length and point count must equal r");
  std::vector<cd> x(points.data(), points.data() + points.size());
  auto pw = power_table(x, std::max(k, 1));
  return std::exp(tab.log_cfactor(m)) * tab.eval_P(m, pw);
}

}  // namespace

cd jack_C(const Partition& m, double alpha, const Eigen::VectorXcd& points, int max_weight) {
  return jack_eval(jack_table_alpha<double>(int(points.size()), alpha), m, points, max_weight);
}

cd jack_C(const Partition& m, const Algebra& a, const Eigen::VectorXcd& points, int max_weight) {
  return jack_eval(jack_table<double>(a.r, a.d), m, points, max_weight);
}

cd phi_m(const Partition& m, const ComplexElement& z, int max_weight) {
  const Algebra& a = z.alg;
  return jack_C(m, a, jordan_eigenvalues(z), max_weight) /
         jack_C(m, a, Eigen::VectorXcd::Ones(a.r), max_weight);
}

Eigen::VectorXcd pair_spectrum(const ComplexElement& z, const ComplexElement& w) {
  require_same(z.alg, w.alg);
  const Algebra& a = z.alg;
  if (a.family == Family::Spin) {
    const cd s = inner(z, w);
    const cd p = det_delta(z) * std::conj(det_delta(w));
    const cd disc = std::sqrt(s * s - 4.0 * p);
    Eigen::VectorXcd mu(2);
    mu << (s + disc) / 2.0, (s - disc) / 2.0;
    return mu;
  }
  Eigen::MatrixXcd M = to_matrix(z) * to_matrix(w).adjoint();
  if (a.r == 1) return M.diagonal();
  return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(M, false).eigenvalues();
}

cd kernel_Km(const Partition& m, const ComplexElement& z, const ComplexElement& w, int max_weight) {
  return jack_C(m, z.alg, pair_spectrum(z, w), max_weight) / std::tgamma(weight(m) + 1.0);
}

int rank_lambda(cd lambda, const Algebra& a) {
  if (std::abs(lambda.imag()) >= 1e-12) return a.r;
  for (int j = 0; j < a.r; ++j) {
    const double u = lambda.real() - j * a.d / 2.0;
    if (u < 1e-12 && std::abs(u - std::round(u)) < 1e-12) return j;
  }
  return a.r;
}

bool wallach_member(double lambda, const Algebra& a) {
  const double top = (a.r - 1) * a.d / 2.0;
  if (lambda > top) return true;
  for (int j = 0; j < a.r; ++j)
    if (std::abs(lambda - j * a.d / 2.0) < 1e-12) return true;
  return false;
}

bool admissible(const Partition& m, int rank) {
  for (int j = rank; j < int(m.size()); ++j)
    if (m[j] != 0) return false;
  return true;
}

double dim_dm(const Partition& m, const Algebra& a, int max_weight) {
  const cd c1 = jack_C(m, a, Eigen::VectorXcd::Ones(a.r), max_weight);
  const double val = (poch_general(cd(a.n_over_r()), m, a.d) * c1).real() / std::tgamma(weight(m) + 1.0);
  if (!(val > 0.5) || std::abs(val - std::round(val)) > 1e-8 * std::max(1.0, val))
    throw MathError(ErrorCode::NonIntegerDimension, "d_m = " + std::to_string(val));
  return std::round(val);
}

}  // namespace cone
