#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"

#include "cone/jordan.hpp"
#include "cone/semigroup.hpp"
#include "common.hpp"

using namespace cone;
using cone::testing::algebras;

namespace {

// Gindikin Gamma from its product formula.
double gamma_omega(const Algebra& a, double lambda) {
  double lg = (a.n - a.r) / 2.0 * std::log(2 * M_PI);
  for (int j = 0; j < a.r; ++j) lg += std::lgamma(lambda - j * a.d / 2.0);
  return std::exp(lg);
}

// V = R kernel from the classical modified Bessel function, without the sinh^{-lambda} factor.
double classical_kernel(double lambda, double t, double x, double y) {
  const double s = std::sinh(t), c = 1 / std::tanh(t);
  const double z = 2 * std::sqrt(x * y) / s;
  if (z - c * (x + y) < -700) return 0.0;
  const double itilde = z == 0 ? 1 / std::tgamma(lambda) : boost::math::cyl_bessel_i(lambda - 1, z) * std::pow(z / 2, 1 - lambda);
  return std::exp(-c * (x + y)) * std::tgamma(lambda) * itilde;
}

// tau_lambda(t) e^{-y} on V = R from the Laplace transform of the kernel.
cd tau_exp_closed(double lambda, cd t, double x) {
  const cd s = std::sinh(t), c = std::cosh(t) / s;
  return std::exp(-lambda * std::log(s) - c * x - lambda * std::log(1.0 + c) + x / (s * s * (1.0 + c)));
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

std::vector<Eigen::VectorXd> line_grid(std::initializer_list<double> xs) {
  std::vector<Eigen::VectorXd> g;
  for (double x : xs) g.push_back(vec({x}));
  return g;
}

RadialFunction exp_profile() {
  return {[](const Eigen::VectorXd& v) { return cd(std::exp(-v.sum())); }, Growth::exponential(-1)};
}

Element rotated_symr2(double b1, double b2, double th) {
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Eigen::Matrix2d B = R * vec({b1, b2}).asDiagonal() * R.transpose();
  return from_real_matrix(Algebra::symr(2), B);
}

}  // namespace

TEST_CASE("cone quadrature reproduces the Gindikin integral") {
  CHECK(ConeQuadrature::c_omega(Algebra::real_line()) == doctest::Approx(1.0).epsilon(1e-12));
  for (const Algebra& a : algebras()) {
    INFO(a.id());
    CHECK(ConeQuadrature::calibration_error(a) <= 1e-6);
    ConeQuadrature q(a, a.r == 1 ? 6 : 4, 1.0, 90.0);
    for (double lambda : {a.n_over_r() + 0.5, a.n_over_r() + 2.25}) {
      double acc = 0.0;
      for (size_t i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd& t = q.nodes()[i];
        acc += q.weights()[i] * std::exp(-t.sum() + (lambda - a.n_over_r()) * t.array().log().sum());
      }
      CHECK(std::abs(acc / gamma_omega(a, lambda) - 1) <= 1e-6);
    }
  }
}

TEST_CASE("isomorphic algebras share the cone constant") {
  CHECK(ConeQuadrature::c_omega(Algebra::symr(2)) == doctest::Approx(ConeQuadrature::c_omega(Algebra::spin(3))).epsilon(1e-9));
  CHECK(ConeQuadrature::c_omega(Algebra::hermc(2)) == doctest::Approx(ConeQuadrature::c_omega(Algebra::spin(4))).epsilon(1e-9));
}

TEST_CASE("kernel at x = 0") {
  std::mt19937_64 rng(3);
  for (const Algebra& a : algebras()) {
    KernelParams p{a, a.n_over_r() + 0.3, cd(0.6, 0.4)};
    const Element y = random_cone(a, rng, 0.1, 3.0);
    const cd ref = std::exp(-(std::cosh(p.t) / std::sinh(p.t)) * trace(y));
    CHECK(std::abs(kernel_K(p, Element::zero(a), y).value - ref) <= 1e-14 * std::abs(ref));
  }
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 rng(11);
  for (const Algebra& a : algebras()) {
    INFO(a.id());
    for (cd t : {cd(0.7, 0.0), cd(0.5, 1.0)}) {
      KernelParams p{a, a.n_over_r() + 0.7, t};
      for (int i = 0; i < 6; ++i) {
        const Element x = random_cone(a, rng, 0.05, 3.0), y = random_cone(a, rng, 0.05, 3.0);
        const cd kxy = kernel_K(p, x, y).value, kyx = kernel_K(p, y, x).value;
        CHECK(std::abs(kxy - kyx) <= 1e-10 * std::abs(kxy));
      }
    }
  }
}

TEST_CASE("real line kernel against the classical Bessel function") {
  for (double lambda : {0.6, 2.0, 3.5})
    for (double t : {0.3, 1.0, 2.5})
      for (double x : {0.0, 0.4, 3.0})
        for (double y : {0.2, 1.7, 9.0}) {
          KernelParams p{Algebra::real_line(), lambda, t};
          const cd k = kernel_K(p, Element(Algebra::real_line(), vec({x})), Element(Algebra::real_line(), vec({y}))).value;
          const double ref = classical_kernel(lambda, t, x, y);
          CHECK(std::abs(k - ref) <= 1e-11 * ref);
          const Eigen::MatrixXcd G = radial_kernel(p, line_grid({x}), line_grid({y}));
          const double pre = std::pow(std::sinh(t), -lambda);
          CHECK(std::abs(G(0, 0) - pre * ref) <= 1e-12 * pre);
        }
}

TEST_CASE("radial kernel is the rotation average in SymR(2)") {
  const Algebra a = Algebra::symr(2);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (cd t : {cd(0.8, 0.0), cd(0.6, 0.5)}) {
    KernelParams p{a, 2.3, t};
    const cd pre = std::exp(-2.0 * p.lambda * std::log(std::sinh(t)));
    for (auto [x1, x2, y1, y2] : std::vector<std::array<double, 4>>{{1.2, 0.3, 2.0, 0.5}, {3.0, 3.0, 1.0, 0.1}, {0.7, 0.0, 4.0, 2.5}}) {
      const Element x = diagonal(a, vec({x1, x2}));
      auto avg = [&](auto part) {
        return GK::integrate([&](double th) { return part(kernel_K(p, x, rotated_symr2(y1, y2, th)).value); }, 0.0, M_PI,
                             10, 1e-13) / M_PI;
      };
      const cd ref = pre * cd(avg([](cd v) { return v.real(); }), avg([](cd v) { return v.imag(); }));
      const Eigen::MatrixXcd G = radial_kernel(p, {vec({x1, x2})}, {vec({y1, y2})});
      CHECK(std::abs(G(0, 0) - ref) <= 1e-9 * std::abs(ref));
    }
  }
}

TEST_CASE("radial kernel at multiples of the unit") {
  std::mt19937_64 rng(5);
  for (const Algebra& a : algebras()) {
    KernelParams p{a, a.n_over_r() + 1.1, cd(0.9, 0.2)};
    const Element y = random_cone(a, rng, 0.1, 2.0);
    const Eigen::VectorXd ey = spectral(y).values;
    const double s = 1.3;
    const cd ref = std::exp(-double(a.r) * p.lambda * std::log(std::sinh(p.t))) * kernel_K(p, s * Element::unit(a), y).value;
    const Eigen::MatrixXcd G = radial_kernel(p, {Eigen::VectorXd::Constant(a.r, s)}, {ey});
    CHECK(std::abs(G(0, 0) - ref) <= 1e-10 * std::abs(ref));
  }
}

TEST_CASE("kernel positivity for real t") {
  std::mt19937_64 rng(17);
  for (const Algebra& a : algebras()) {
    const double wallach = (a.r - 1) * a.d / 2.0;
    for (double lambda : {wallach + 0.05, a.n_over_r() + 0.5})
      for (double t : {0.4, 1.5}) {
        KernelParams p{a, lambda, t};
        for (int i = 0; i < 5; ++i) {
          const cd k = kernel_K(p, random_cone(a, rng, 0.0, 2.0), random_cone(a, rng, 0.0, 2.0)).value;
          CHECK(k.real() > 0);
          CHECK(std::abs(k.imag()) <= 1e-14 * k.real());
        }
      }
  }
}

TEST_CASE("kernel decays monotonically along rays") {
  std::mt19937_64 rng(23);
  for (const Algebra& a : {Algebra::real_line(), Algebra::symr(2), Algebra::hermc(2), Algebra::spin(5)}) {
    for (cd t : {cd(0.8, 0.0), cd(0.8, 1.0), cd(1.2, 2.8)}) {
      KernelParams p{a, a.n_over_r() + 0.5, t};
      const Element x = random_cone(a, rng, 0.2, 1.0);
      const double first = std::abs(kernel_K(p, x, x).value);
      double prev = first;
      for (double s = 1.5; s <= 26; s *= 1.5) {
        const double cur = std::abs(kernel_K(p, s * x, s * x).value);
        CHECK(cur < prev);
        prev = cur;
      }
      CHECK(prev < 1e-2 * first);
    }
  }
}

TEST_CASE("kernel parameter validation") {
  const Algebra a = Algebra::symr(2);
  CHECK_THROWS_AS(KernelParams({a, 0.4, 1.0}).validate(), MathError);
  CHECK_THROWS_AS(KernelParams({a, 2.0, cd(-0.1, 0.0)}).validate(), MathError);
  CHECK_THROWS_AS(KernelParams({a, 2.0, cd(0.0, M_PI)}).validate(), MathError);
  KernelParams({a, 2.0, cd(0.0, 1.0)}).validate();
  CHECK(decay_exponent(cd(0.8, 0.0)) == doctest::Approx(std::tanh(0.4)).epsilon(1e-15));
}

TEST_CASE("tau against closed form and direct quadrature") {
  const Algebra R = Algebra::real_line();
  for (double t : {0.5, 1.3}) {
    KernelParams p{R, 2.0, t};
    const auto out = tau_apply(p, exp_profile(), line_grid({0.0, 0.5, 2.0, 7.0}));
    const double xs[] = {0.0, 0.5, 2.0, 7.0};
    for (int i = 0; i < 4; ++i) {
      const double x = xs[i];
      boost::math::quadrature::tanh_sinh<double> ts;
      const double direct = ts.integrate(
                                [&](double y) {
                                  return std::exp(-y) * std::pow(std::sinh(t), -2.0) * classical_kernel(2.0, t, x, y) * y;
                                },
                                0.0, std::numeric_limits<double>::infinity(), 1e-14) /
                            std::tgamma(2.0);
      CHECK(std::abs(out[i].value - direct) <= 1e-8 * direct);
      CHECK(std::abs(out[i].value - tau_exp_closed(2.0, t, x)) <= 1e-9 * direct);
    }
  }
}

TEST_CASE("tau for complex t") {
  const Algebra R = Algebra::real_line();
  for (cd t : {cd(0.5, 1.0), cd(1.0, 0.3)}) {
    KernelParams p{R, 1.5, t};
    const auto out = tau_apply(p, exp_profile(), line_grid({0.0, 1.0, 3.0}));
    const double xs[] = {0.0, 1.0, 3.0};
    for (int i = 0; i < 3; ++i) {
      const cd ref = tau_exp_closed(1.5, t, xs[i]);
      CHECK(std::abs(out[i].value - ref) <= 1e-8 * std::abs(ref));
    }
  }
}

TEST_CASE("tau at t = iv stays bounded") {
  const Algebra R = Algebra::real_line();
  for (double v : {M_PI / 2, 1.2}) {
    const double lambda = 2.0;
    KernelParams p{R, lambda, cd(0.0, v)};
    const std::vector<double> xs = {0.0, 1.0, 2.5, 4.0, 6.0};
    std::vector<Eigen::VectorXd> g;
    for (double x : xs) g.push_back(vec({x}));
    const auto out = tau_apply(p, exp_profile(), g);
    for (size_t i = 0; i < xs.size(); ++i) {
      INFO(v, " ", xs[i]);
      CHECK(std::abs(out[i].value) <= std::pow(std::sin(v), -lambda) * (1 + 1e-9));
      const cd ref = tau_exp_closed(lambda, cd(0.0, v), xs[i]);
      CHECK(std::abs(out[i].value - ref) <= 1e-7 * std::pow(std::sin(v), -lambda));
    }
  }
}

TEST_CASE("tau is close to the identity for small t") {
  const Algebra R = Algebra::real_line();
  RadialFunction bump{[](const Eigen::VectorXd& v) { return cd(std::exp(-0.25 * (v(0) - 3) * (v(0) - 3))); },
                      Growth::bounded()};
  double prev = 1e300;
  for (double t : {0.1, 0.05, 0.025}) {
    KernelParams p{R, 2.0, t};
    const auto out = tau_apply(p, bump, line_grid({2.0, 3.0, 3.5}));
    const double xs[] = {2.0, 3.0, 3.5};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(out[i].value - bump(vec({xs[i]}))));
    CHECK(worst < 0.7 * prev);
    prev = worst;
  }
  CHECK(prev < 0.15);
}

TEST_CASE("tau is linear") {
  const Algebra a = Algebra::spin(3);
  KernelParams p{a, 2.5, cd(0.9, 0.4)};
  RadialFunction f{[](const Eigen::VectorXd& v) { return cd(std::exp(-v.sum())); }, Growth::exponential(-1)};
  RadialFunction g{[](const Eigen::VectorXd& v) { return cd(v.prod() * std::exp(-2 * v.sum())); }, Growth::exponential(-2)};
  const cd alpha(1.5, -0.5), beta(-2.0, 0.0);
  RadialFunction h{[&](const Eigen::VectorXd& v) { return alpha * f(v) + beta * g(v); }, Growth::exponential(-1)};
  const std::vector<Eigen::VectorXd> grid = {vec({1.0, 0.5}), vec({2.0, 0.1})};
  TauOptions opt;
  opt.rel_tol = 1e-8;
  const auto tf = tau_apply(p, f, grid, opt), tg = tau_apply(p, g, grid, opt), th = tau_apply(p, h, grid, opt);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(th[i].value - (alpha * tf[i].value + beta * tg[i].value)) <= 1e-7 * std::abs(th[i].value));
}

TEST_CASE("tau on an element uses its eigenvalues") {
  const Algebra a = Algebra::symr(2);
  KernelParams p{a, 3.0, 0.8};
  std::mt19937_64 rng(29);
  const Element x = random_cone(a, rng, 0.2, 2.0);
  const EvalResult viaElement = tau_apply(p, exp_profile(), x);
  const EvalResult viaGrid = tau_apply(p, exp_profile(), std::vector<Eigen::VectorXd>{spectral(x).values}).front();
  CHECK(std::abs(viaElement.value - viaGrid.value) <= 1e-12 * std::abs(viaGrid.value));
  CHECK_THROWS_AS(tau_apply(p, exp_profile(), Element(a, vec({-1.0, 0.5, 0.0}))), MathError);
}

TEST_CASE("growth incompatible with the kernel") {
  const Algebra R = Algebra::real_line();
  RadialFunction grow{[](const Eigen::VectorXd& v) { return cd(std::exp(v(0))); }, Growth::exponential(1.0)};
  try {
    tau_apply(KernelParams{R, 2.0, 1.0}, RadialFunction{grow.f, Growth::exponential(1.5)}, line_grid({1.0}));
    FAIL("expected GrowthIncompatible");
  } catch (const MathError& e) {
    CHECK(e.code() == ErrorCode::GrowthIncompatible);
  }
  RadialFunction one{[](const Eigen::VectorXd&) { return cd(1.0); }, Growth::bounded()};
  CHECK_THROWS_AS(tau_apply(KernelParams{R, 2.0, cd(0.0, 1.0)}, one, line_grid({1.0})), MathError);
  CHECK_NOTHROW(tau_apply(KernelParams{R, 2.0, 1.0}, grow, line_grid({1.0})));
  CHECK_NOTHROW(tau_apply(KernelParams{R, 2.0, 0.3}, grow, line_grid({1.0})));
}

TEST_CASE("semigroup law on the real line") {
  const Algebra R = Algebra::real_line();
  const auto rep = semigroup_check(R, 3.0, 0.5, 0.5, exp_profile(), line_grid({0.0, 0.5, 1.0, 2.0, 4.0}));
  CHECK(rep.discrepancy <= 1e-6);
  for (const auto& row : rep.rows) CHECK(std::abs(row.direct - tau_exp_closed(3.0, 1.0, row.x(0))) <= 1e-9 * std::abs(row.direct));
  const auto rep2 = semigroup_check(R, 2.0, cd(0.4, 0.7), cd(0.8, -0.2), exp_profile(), line_grid({0.0, 1.0, 3.0}));
  CHECK(rep2.discrepancy <= 1e-6);
}

TEST_CASE("semigroup law in rank two") {
  RadialFunction gauss{[](const Eigen::VectorXd& v) { return cd(std::exp(-v.squaredNorm())); }, Growth::exponential(-1)};
  TauOptions opt;
  opt.rel_tol = 1e-5;
  const auto rep = semigroup_check(Algebra::symr(2), 3.0, 1.0, 0.9, gauss, {vec({1.0, 0.5}), vec({2.0, 0.2})}, opt);
  CHECK(rep.discrepancy <= 1e-4);
  CHECK_THROWS_AS(semigroup_check(Algebra::symr(2), 1.5, 1.0, 1.0, gauss, {vec({1.0, 0.5})}), MathError);
  CHECK_THROWS_AS(semigroup_check(Algebra::real_line(), 2.0, cd(0.0, 1.0), 1.0, exp_profile(), line_grid({1.0})), MathError);
}

TEST_CASE("kernel bound verifier") {
  std::mt19937_64 rng(31);
  for (cd t : {cd(0.5, 0.0), cd(0.5, 1.0)}) {
    const auto rep = kernel_bound_check(KernelParams{Algebra::real_line(), 2.0, t}, 0, 300, rng);
    CHECK(std::isfinite(rep.c_star));
    CHECK(rep.violations == 0);
    CHECK(rep.validation_max <= rep.c_star);
  }
  const auto rep = kernel_bound_check(KernelParams{Algebra::symr(2), 4.0, 0.7}, 0, 100, rng);
  CHECK(std::isfinite(rep.c_star));
  CHECK(rep.violations == 0);
  CHECK(rep.kappa == doctest::Approx(std::tanh(0.35)).epsilon(1e-15));
  CHECK_THROWS_AS(kernel_bound_check(KernelParams{Algebra::symr(2), 1.2, 0.7}, 0, 10, rng), MathError);
}

TEST_CASE("diagonal decay rate for real t") {
  // log|K(se, se)| = a + b s + c log s + O(1/s); three rays pin b, which should be -2 r tanh(u/2).
  for (const Algebra& a : {Algebra::real_line(), Algebra::symr(2), Algebra::spin(5)}) {
    for (double u : {0.7, 1.2}) {
      KernelParams p{a, a.n_over_r() + 0.5, u};
      const Element e = Element::unit(a);
      const double s[] = {6.0, 12.0, 24.0};
      double l[3];
      for (int i = 0; i < 3; ++i) l[i] = std::log(std::abs(kernel_K(p, s[i] * e, s[i] * e).value));
      // Doubling s makes the log s contributions to both differences equal.
      const double d1 = l[1] - l[0], d2 = l[2] - l[1];
      const double b = (d2 - d1) / (s[2] - s[1] - (s[1] - s[0]));
      CHECK(b / (2 * a.r) == doctest::Approx(-std::tanh(u / 2)).epsilon(1e-2));
    }
  }
}

TEST_CASE("Hankel transform on the real line") {
  for (double lambda : {1.0, 2.5})
    for (double x : {0.0, 0.3, 1.0, 4.0}) {
      CHECK(std::abs(hankel_V_R(lambda, [](double y) { return cd(std::exp(-y)); }, x) - std::exp(-x)) <= 1e-9);
      // y^j e^{-y} maps to (lambda)_j e^{-x} 1F1(-j; lambda; x).
      for (int j = 1; j <= 2; ++j) {
        double poch = 1, poly = 0, term = 1;
        for (int i = 0; i < j; ++i) poch *= lambda + i;
        for (int i = 0; i <= j; ++i) {
          poly += term;
          term *= (i - j) / (lambda + i) * x / (i + 1);
        }
        const cd h = hankel_V_R(lambda, [j](double y) { return cd(std::pow(y, j) * std::exp(-y)); }, x);
        CHECK(std::abs(h - poch * std::exp(-x) * poly) <= 1e-9);
      }
    }
  CHECK_THROWS_AS(hankel_V_R(Algebra::symr(2), 1.0, [](double y) { return cd(std::exp(-y)); }, 1.0), MathError);
  CHECK_NOTHROW(hankel_V_R(Algebra::real_line(), 1.0, [](double y) { return cd(std::exp(-y)); }, 1.0));
}

TEST_CASE("Hankel transform is an involution") {
  for (double lambda : {1.0, 1.7})
    for (int j = 0; j <= 2; ++j) {
      auto phi = [j](double y) { return cd(std::pow(y, j) * std::exp(-y)); };
      auto once = [&](double y) { return hankel_V_R(lambda, phi, y, 1e-12); };
      double worst = 0.0;
      for (double x : {0.0, 0.5, 1.5, 3.0}) worst = std::max(worst, std::abs(hankel_V_R(lambda, once, x, 1e-9, 64.0) - phi(x)));
      CHECK(worst <= 1e-4);
    }
  auto f = [](double y) { return cd(std::exp(-y)); };
  auto g = [](double y) { return cd(y * std::exp(-2 * y)); };
  const cd lhs = hankel_V_R(1.3, [&](double y) { return 2.0 * f(y) - 3.0 * g(y); }, 0.8);
  CHECK(std::abs(lhs - (2.0 * hankel_V_R(1.3, f, 0.8) - 3.0 * hankel_V_R(1.3, g, 0.8))) <= 1e-9);
}

TEST_CASE("Mehler consistency") {
  const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0, 4.0};
  for (int N : {2, 5})
    for (cd t : {cd(0.5, 0.0), cd(1.0, 0.3)}) {
      const auto one = mehler_radial_check(N, t, [](double) { return cd(1.0); }, Growth::bounded(), grid);
      const auto ex = mehler_radial_check(N, t, [](double y) { return cd(std::exp(-y)); }, Growth::exponential(-1), grid);
      CHECK(one.discrepancy <= 1e-6);
      CHECK(ex.discrepancy <= 1e-6);
      // Constant profile: tau(t) 1 = cosh^{-lambda} t e^{-x tanh t}.
      for (const auto& row : one.rows) {
        const cd ref = std::exp(-(N / 2.0) * std::log(std::cosh(t)) - row.x * std::tanh(t));
        CHECK(std::abs(row.hermite - ref) <= 1e-8 * std::abs(ref));
      }
    }
  // Large real t: both sides decay like the projection onto the ground state.
  const auto far = mehler_radial_check(3, 6.0, [](double y) { return cd(std::exp(-y)); }, Growth::exponential(-1), grid);
  CHECK(far.discrepancy <= 1e-6);
  for (const auto& row : far.rows) CHECK(std::abs(row.hermite / row.tau - 1.0) <= 1e-6);
  CHECK_THROWS_AS(mehler_radial_check(1, 0.5, [](double) { return cd(1.0); }, Growth::bounded(), grid), MathError);
}
