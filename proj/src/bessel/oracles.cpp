#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/trapezoidal.hpp>

#include "cone/bessel.hpp"

namespace cone {

cd tube_contour_oracle(double lambda, double x) {
  if (!(lambda > 0)) throw MathError(ErrorCode::ParameterOutOfRange, "tube oracle needs lambda > 0");
  // Parabola w = s(1+iu)^2 through s, homotopic to 1 + iR in the cut plane; e^w decays like e^{-s u^2}.
  const double s = std::max(1.0, std::sqrt(std::abs(x)));
  const double U = std::sqrt(1.0 + (80.0 + 2.0 * std::sqrt(std::abs(x)) + lambda * std::log(s + 1.0)) / s);
  auto g = [&](double u) {
    const cd z(1.0, u);
    const cd w = s * z * z;
    return s * z * std::exp(w + x / w - lambda * std::log(w));
  };
  using boost::math::quadrature::trapezoidal;
  const double re = trapezoidal([&](double u) { return g(u).real(); }, -U, U, 1e-15, 20);
  const double im = trapezoidal([&](double u) { return g(u).imag(); }, -U, U, 1e-15, 20);
  return std::tgamma(lambda) / M_PI * cd(re, im);
}

cd tube_contour_oracle(const Algebra& a, double lambda, double x) {
  if (!(a == Algebra::real_line()))
    throw MathError(ErrorCode::UnsupportedAlgebra, "tube oracle is available for V = R only");
  return tube_contour_oracle(lambda, x);
}

namespace {

double norm1(const ComplexElement& z) { return pnorm(z, 1.0); }

}  // namespace

double bound_ratio(const BesselParams& p, const ComplexElement& x, double* err) {
  const int rank = rank_lambda(p.lambda, p.alg);
  const ComplexElement y = jordan_product(x, x);
  SeriesOptions opt;
  opt.max_weight = 1200;
  opt.rel_tol = 1e-10;
  EvalResult v = bessel_series(p, y, opt);
  const double n1 = norm1(x);
  const double part = p.kind == Kind::I ? norm1(ComplexElement(x.re())) : norm1(ComplexElement(x.im()));
  const double denom = (1.0 + std::pow(n1, double(rank * p.k))) * std::exp(2.0 * part);
  if (err) *err = v.error / denom;
  return std::abs(v.value) / denom;
}

ComplexElement random_on_variety(const Algebra& a, int l, int family, double target, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N;
  ComplexElement x;
  if (family == 2 && l >= a.r && U(rng) < 0.5) {
    x = random_complex(a, rng);
  } else {
    Eigen::VectorXcd zeta = Eigen::VectorXcd::Zero(a.r);
    for (int j = 0; j < std::min(l, a.r); ++j) {
      const double mag = -std::log(1.0 - U(rng));
      const double sign = U(rng) < 0.5 ? -1.0 : 1.0;
      if (family == 0) zeta(j) = sign * mag;
      else if (family == 1) zeta(j) = cd(0, sign * mag);
      else zeta(j) = std::polar(mag, 2 * M_PI * U(rng));
    }
    ComplexElement d = diagonal(a, zeta);
    Eigen::MatrixXd k = haar_KL_sample(a, rng);
    x = ComplexElement(a, k.cast<cd>() * d.c);
  }
  const double n1 = norm1(x);
  if (n1 == 0) return x;
  return cd(target / n1) * x;
}

BoundReport upper_bound_check(const BesselParams& p, int sample_count, std::mt19937_64& rng, double max_norm1) {
  const Algebra& a = p.alg;
  if (!(p.lambda.real() + p.k > 2.0 * a.n / a.r - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "Re(lambda) + k must exceed 2n/r - 1");
  const int rank = rank_lambda(p.lambda, a);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  BoundReport rep;

  struct Cand {
    ComplexElement x;
    double ratio;
    int family;
  };
  std::vector<Cand> cal;
  auto eval = [&](const ComplexElement& x, int family) {
    double e = 0.0;
    const double r = bound_ratio(p, x, &e);
    rep.max_error = std::max(rep.max_error, e);
    cal.push_back({x, r, family});
    rep.calibration.push_back({norm1(x), r, family});
  };

  // Deterministic points: origin and rays through rank-one and full-rank diagonals.
  eval(ComplexElement::zero(a), 0);
  for (int step = 1; step <= 20; ++step) {
    const double t = max_norm1 * step / 20.0;
    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(a.r);
    one(0) = t;
    eval(diagonal(a, one), 0);
    eval(cd(0, 1) * diagonal(a, one), 1);
    if (rank >= a.r) {
      Eigen::VectorXcd flat = Eigen::VectorXcd::Constant(a.r, t / a.r);
      eval(diagonal(a, flat), 0);
      eval(cd(0, 1) * diagonal(a, flat), 1);
    }
  }
  for (int i = 0; i < sample_count; ++i) {
    const int family = i % 3;
    eval(random_on_variety(a, rank, family, max_norm1 * U(rng), rng), family);
  }

  // Local refinement around the largest ratios.
  std::vector<size_t> order(cal.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return cal[i].ratio > cal[j].ratio; });
  std::normal_distribution<double> N;
  const size_t top = std::min<size_t>(8, order.size());
  std::vector<Cand> seeds;
  for (size_t i = 0; i < top; ++i) seeds.push_back(cal[order[i]]);
  for (Cand best : seeds) {
    double step = 0.05;
    for (int it = 0; it < 60; ++it) {
      ComplexElement y = std::polar(1.0 + step * N(rng), step * N(rng)) * best.x;
      if (rank >= a.r) y = y + cd(step) * random_complex(a, rng, std::max(1e-3, norm1(best.x) / a.n));
      const double n1 = norm1(y);
      if (n1 > max_norm1) y = cd(max_norm1 / n1) * y;
      double e = 0.0;
      const double r = bound_ratio(p, y, &e);
      rep.max_error = std::max(rep.max_error, e);
      if (r > best.ratio) {
        best = {y, r, 2};
        rep.calibration.push_back({norm1(y), r, 2});
      } else {
        step *= 0.9;
      }
    }
    cal.push_back(best);
  }
  for (const Cand& c : cal) {
    if (c.ratio > rep.c_star) {
      rep.c_star = c.ratio;
      rep.argmax_norm1 = norm1(c.x);
    }
  }
  rep.calibration_count = int(rep.calibration.size());

  for (int i = 0; i < sample_count; ++i) {
    const int family = i % 3;
    ComplexElement x = random_on_variety(a, rank, family, max_norm1 * U(rng), rng);
    double e = 0.0;
    const double r = bound_ratio(p, x, &e);
    rep.max_error = std::max(rep.max_error, e);
    rep.validation.push_back({norm1(x), r, family});
    rep.validation_max = std::max(rep.validation_max, r);
    if (r > rep.c_star * (1 + 1e-12)) ++rep.violations;
  }
  rep.validation_count = sample_count;
  return rep;
}

}  // namespace cone
