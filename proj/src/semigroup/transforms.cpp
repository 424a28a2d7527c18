#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cone/semigroup.hpp"

namespace cone {

namespace {

// Real and imaginary parts integrated separately on (0, inf).
template <class F>
cd half_line(F&& f, double rel_tol, const char* what) {
  boost::math::quadrature::exp_sinh<double> es;
  double err_re = 0, err_im = 0, l1_re = 0, l1_im = 0;
  const double re = es.integrate([&](double y) { return f(y).real(); }, rel_tol, &err_re, &l1_re);
  const double im = es.integrate([&](double y) { return f(y).imag(); }, rel_tol, &err_im, &l1_im);
  const double scale = std::max({std::abs(re), std::abs(im), 1e-3 * (l1_re + l1_im)});
  if (!(err_re + err_im <= std::max(100 * rel_tol * scale, 1e-13 * (l1_re + l1_im))))
    throw MathError(ErrorCode::QuadratureNotConverged, what);
  return {re, im};
}

// Smallest dyadic Y past which |phi(y)| y^lambda stays below 1e-18 of its scanned peak.
double decay_horizon(const std::function<cd(double)>& phi, double lambda) {
  double peak = 0.0;
  int quiet = 0;
  for (int k = -6; k <= 30; ++k) {
    const double y = std::ldexp(1.0, k);
    const double m = std::abs(phi(y)) * std::pow(y, lambda);
    peak = std::max(peak, m);
    quiet = (y >= 8 && m <= 1e-18 * peak) ? quiet + 1 : 0;
    if (quiet == 2) return y;
  }
  throw MathError(ErrorCode::QuadratureNotConverged, "Hankel transform needs a decaying profile");
}

struct Panel {
  double a, b;
  cd value;
  double err, l1;
  int depth;
};

// Fixed 31-point Gauss-Kronrod rule; the library reports the error on [-1, 1], so it is rescaled here.
template <class F>
Panel gk_panel(F&& f, double a, double b, int depth) {
  double e = 0, n = 0;
  const cd v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e, &n);
  return {a, b, v, e * (b - a) / 2, n, depth};
}

}  // namespace

cd hankel_V_R(double lambda, const std::function<cd(double)>& phi, double x, double rel_tol, double horizon) {
  if (!(lambda > 0)) throw MathError(ErrorCode::ParameterOutOfRange, "Hankel transform needs lambda > 0");
  if (!(x >= 0)) throw MathError(ErrorCode::ParameterOutOfRange, "Hankel transform is evaluated on x >= 0");
  const double g = std::tgamma(lambda);
  // One period of the Bessel oscillation per panel in u = 2 sqrt(s y); y = u^2 / 4s, dy = u du / 2s.
  const double sc = x > 0 ? x : 1.0;
  const double Y = horizon > 0 ? horizon : decay_horizon(phi, lambda);
  const double umax = 2 * std::sqrt(sc * Y);
  const int panels = std::max(1, int(std::ceil(umax / M_PI)));
  auto f = [&](double u) -> cd {
    const double y = u * u / (4 * sc);
    if (y == 0) return 0.0;
    return phi(y) * bessel_J_real_line(lambda, x * y) * std::pow(y, lambda - 1) * u / (2 * sc * g);
  };
  std::vector<Panel> work;
  for (int k = 0; k < panels; ++k) work.push_back(gk_panel(f, M_PI * k, std::min(umax, M_PI * (k + 1)), 0));
  // Bisect panels against a global absolute target; the mass fixes the target after the first pass.
  cd acc = 0.0;
  double err = 0.0, l1 = 0.0;
  for (int pass = 0; pass < 40; ++pass) {
    acc = 0.0, err = 0.0, l1 = 0.0;
    for (const Panel& q : work) acc += q.value, err += q.err, l1 += q.l1;
    const double target = rel_tol * std::max(std::abs(acc), l1);
    if (err <= target) break;
    std::vector<Panel> next;
    bool split = false;
    for (const Panel& q : work) {
      if (q.err > target * (q.b - q.a) / umax && q.depth < 12) {
        const double m = (q.a + q.b) / 2;
        next.push_back(gk_panel(f, q.a, m, q.depth + 1));
        next.push_back(gk_panel(f, m, q.b, q.depth + 1));
        split = true;
      } else {
        next.push_back(q);
      }
    }
    work.swap(next);
    if (!split) break;
  }
  // Cancellation limits the attainable accuracy to a multiple of rel_tol times the L1 mass.
  if (!(err <= 10 * rel_tol * std::max(std::abs(acc), l1)))
    throw MathError(ErrorCode::QuadratureNotConverged, "Hankel quadrature did not converge");
  return acc;
}

cd hankel_V_R(const Algebra& a, double lambda, const std::function<cd(double)>& phi, double x, double rel_tol,
              double horizon) {
  if (!(a == Algebra::real_line()))
    throw MathError(ErrorCode::UnsupportedAlgebra, "the Hankel transform is implemented for V = R only");
  return hankel_V_R(lambda, phi, x, rel_tol, horizon);
}

MehlerReport mehler_radial_check(int N, cd t, const std::function<cd(double)>& F, Growth growth,
                                 const std::vector<double>& grid) {
  if (N < 2) throw MathError(ErrorCode::ParameterOutOfRange, "Mehler check needs N >= 2");
  const double lambda = N / 2.0;
  KernelParams p{Algebra::real_line(), lambda, t};
  p.validate();
  const cd sh = std::sinh(t), coth = std::cosh(t) / sh;
  const double sphere = 2 * std::pow(M_PI, (N - 1) / 2.0) / std::tgamma((N - 1) / 2.0);
  const cd pre = std::pow(2 * M_PI, -N / 2.0) * std::exp(-(N / 2.0) * std::log(sh)) * sphere;

  // Sphere average of e^{a cos}, scaled by e^{-|Re a|}.
  auto sphere_avg = [&](cd a) {
    const double shift = std::abs(a.real());
    auto f = [&](double th) { return std::exp(a * std::cos(th) - shift) * std::pow(std::sin(th), N - 2); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double re = GK::integrate([&](double th) { return f(th).real(); }, 0.0, M_PI, 12, 1e-14);
    const double im = GK::integrate([&](double th) { return f(th).imag(); }, 0.0, M_PI, 12, 1e-14);
    return cd(re, im);
  };

  std::vector<Eigen::VectorXd> pts;
  for (double x : grid) pts.push_back(Eigen::VectorXd::Constant(1, x));
  RadialFunction Fr{[&](const Eigen::VectorXd& v) { return F(v(0)); }, growth};
  TauOptions to;
  to.rel_tol = 1e-10;
  const std::vector<EvalResult> tau = tau_apply(p, Fr, pts, to);

  MehlerReport rep;
  double sup_tau = 0.0, sup_diff = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double xi2 = 2 * grid[i];
    const double xi = std::sqrt(xi2);
    const cd h = pre * half_line(
                           [&](double rho) {
                             const cd a = rho * xi / sh;
                             const cd g = std::exp(-0.5 * coth * (xi2 + rho * rho) + std::abs(a.real()));
                             if (g == 0.0) return cd(0.0);
                             return std::pow(rho, N - 1) * F(rho * rho / 2) * g * sphere_avg(a);
                           },
                           1e-11, "Hermite side quadrature did not converge");
    rep.rows.push_back({grid[i], h, tau[i].value});
    sup_tau = std::max(sup_tau, std::abs(tau[i].value));
    sup_diff = std::max(sup_diff, std::abs(h - tau[i].value));
  }
  rep.discrepancy = sup_diff / sup_tau;
  return rep;
}

}  // namespace cone
