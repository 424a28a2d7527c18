#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "cli.hpp"
#include "cone/bessel.hpp"
#include "cone/jordan.hpp"
#include "cone/semigroup.hpp"
#include "cone/spherical.hpp"

namespace cone::cli {

using nlohmann::json;

namespace {

std::vector<Algebra> default_algebras() {
  return {Algebra::real_line(), Algebra::symr(2), Algebra::symr(3), Algebra::hermc(2),
          Algebra::hermc(3),    Algebra::spin(3), Algebra::spin(4), Algebra::spin(5)};
}

std::vector<Algebra> selected(const VerifyOptions& o) {
  if (o.algebra.empty()) return default_algebras();
  return {Algebra::parse(o.algebra)};
}

// Records a check with value <= limit as the pass criterion.
void add(std::vector<Check>& out, const std::string& suite, const std::string& name, double value, double limit,
         json detail = json::object()) {
  out.push_back({suite, name, std::isfinite(value) && value <= limit, value, limit, std::move(detail)});
}

double rel(cd got, cd ref, double floor = 1.0) { return std::abs(got - ref) / std::max(floor, std::abs(ref)); }

ComplexElement scalar(cd v) { return ComplexElement(Algebra::real_line(), Eigen::VectorXcd::Constant(1, v)); }

ComplexElement diag2(const Algebra& a, double s, double t) {
  Eigen::VectorXcd v(2);
  v << s, t;
  return diagonal(a, v);
}

double structural_tr_xy(const Element& x, const Element& y) {
  if (x.alg.family == Family::Spin) {
    Eigen::VectorXcd vx = spin_view(x), vy = spin_view(y);
    return 2.0 * (vx.array() * vy.array()).sum().real();
  }
  return (to_matrix(x) * to_matrix(y)).trace().real();
}

double conj_exp(double p) {
  if (p == 1.0) return INFINITY;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1);
}

double binomial(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

MCSpec mc_spec(long long n, const VerifyOptions& o) {
  MCSpec mc;
  mc.samples = n;
  mc.seed = o.seed;
  mc.threads = o.threads;
  return mc;
}

}  // namespace

json to_json(const Check& c) {
  return {{"suite", c.suite}, {"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit},
          {"detail", c.detail}};
}

std::vector<Check> verify_core(const VerifyOptions& o) {
  std::vector<Check> out;
  const int pairs = o.quick ? 200 : 2000;
  const std::vector<double> ps = {1.0, 1.5, 2.0, 3.0, INFINITY};
  for (const Algebra& a : selected(o)) {
    std::mt19937_64 rng(o.seed);
    const json tag = {{"algebra", a.id()}};
    double ortho = 0, recon = 0, idem = 0;
    for (int i = 0; i < 50; ++i) {
      const Element x = random_element(a, rng), y = random_element(a, rng);
      ortho = std::max(ortho, std::abs(inner(x, y) - structural_tr_xy(x, y)) / (1 + x.c.norm() * y.c.norm()));
      const SpectralData s = spectral(x);
      Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(a.n), units = Eigen::VectorXcd::Zero(a.n);
      for (int j = 0; j < a.r; ++j) {
        sum += s.values(j) * s.frame[j].c;
        units += s.frame[j].c;
        for (int k = 0; k < a.r; ++k) {
          const ComplexElement p = jordan_product(s.frame[j], s.frame[k]);
          idem = std::max(idem, (j == k ? (p.c - s.frame[j].c) : p.c).norm());
        }
      }
      recon = std::max(recon, (sum - x.c.cast<cd>()).norm() / (1 + x.c.norm()));
      idem = std::max(idem, (units - Element::unit(a).c.cast<cd>()).norm());
    }
    add(out, "core", "orthonormal coordinates", ortho, 1e-12, tag);
    add(out, "core", "spectral reconstruction", recon, 1e-10, tag);
    add(out, "core", "Jordan frame", idem, 1e-10, tag);

    double axioms = 0, hoelder = 0, duality = 0;
    for (int i = 0; i < pairs; ++i) {
      const ComplexElement x = random_complex(a, rng), y = random_complex(a, rng);
      const cd s(std::normal_distribution<double>(0, 1)(rng), 0.7);
      for (double p : ps) {
        const double nx = pnorm(x, p), ny = pnorm(y, p), q = conj_exp(p);
        if (!(nx > 0)) axioms = INFINITY;
        axioms = std::max(axioms, std::abs(pnorm(s * x, p) - std::abs(s) * nx) / (std::abs(s) * nx));
        axioms = std::max(axioms, (pnorm(x + y, p) - nx - ny) / (nx + ny));
        hoelder = std::max(hoelder, std::abs(inner(x, y)) / (nx * pnorm(y, q)) - 1);
        const ComplexElement ys = pnorm_dual_maximizer(x, p);
        duality = std::max({duality, std::abs(pnorm(ys, q) - 1), std::abs(std::abs(inner(x, ys)) - nx) / nx});
      }
    }
    add(out, "core", "norm axioms", axioms, 1e-12, tag);
    add(out, "core", "Hoelder inequality", hoelder, 1e-12, tag);
    add(out, "core", "duality maximizer", duality, 1e-10, tag);

    double dom = 0;
    int mismatch = 0;
    for (int i = 0; i < 100; ++i) {
      const ComplexElement w = random_complex(a, rng, 0.5);
      const bool inside = pnorm(w, INFINITY) < 1;
      if (inside != in_domain_D(w)) ++mismatch;
      if (inside) dom = std::max(dom, std::abs(generic_norm_h(w) - generic_norm_h_detB(w)) / generic_norm_h(w));
    }
    add(out, "core", "domain membership", mismatch, 0, tag);
    add(out, "core", "generic norm against Det B", dom, 1e-9, tag);
  }
  return out;
}

std::vector<Check> verify_spherical(const VerifyOptions& o) {
  std::vector<Check> out;
  const int kmax = o.quick ? 6 : 10;
  for (const Algebra& a : selected(o)) {
    std::mt19937_64 rng(o.seed);
    const json tag = {{"algebra", a.id()}};
    std::normal_distribution<double> G;
    double norm = 0;
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXcd pts(a.r);
      for (int i = 0; i < a.r; ++i) pts(i) = cd(G(rng), G(rng));
      for (int k = 0; k <= kmax; ++k) {
        cd sum = 0.0;
        for (const Partition& m : partitions_of(a.r, k)) sum += jack_C(m, a, pts);
        norm = std::max(norm, std::abs(sum - std::pow(pts.sum(), k)) / std::pow(pts.cwiseAbs().sum(), k));
      }
    }
    add(out, "spherical", "Jack normalization (relative to (sum |t_i|)^k)", norm, 1e-10, tag);

    const ComplexElement z = random_complex(a, rng, 0.4), w = random_complex(a, rng, 0.4);
    const ComplexElement x = random_complex(a, rng, 0.8), x2 = jordan_product(x, x);
    const ComplexElement e(Element::unit(a));
    cd acc = 0.0;
    double square = 0;
    for (int k = 0; k <= 30; ++k)
      for (const Partition& m : partitions_of(a.r, k)) {
        acc += kernel_Km(m, z, w);
        if (k <= 6) square = std::max(square, rel(kernel_Km(m, x, x.conj()), kernel_Km(m, x2, e), 1e-12));
      }
    add(out, "spherical", "kernel sum is the exponential", rel(acc, std::exp(inner(z, w)), 0.0), 1e-12, tag);
    add(out, "spherical", "K(x, conj x) = K(x^2, e)", square, 1e-8, tag);

    double dims = 0;
    for (int k = 0; k <= 5; ++k) {
      double total = 0;
      for (const Partition& m : partitions_of(a.r, k)) {
        const double dm = dim_dm(m, a);
        dims = std::max(dims, std::abs(dm - std::round(dm)));
        total += dm;
      }
      dims = std::max(dims, std::abs(total - binomial(a.n + k - 1, k)));
    }
    add(out, "spherical", "graded dimensions", dims, 1e-6, tag);

    std::uniform_real_distribution<double> U(0.3, 4);
    double gam = 0;
    for (int it = 0; it < 20; ++it) {
      Eigen::VectorXcd sv(a.r), sm(a.r);
      std::vector<int> m(a.r);
      for (int j = 0; j < a.r; ++j) {
        sv(j) = cd(U(rng) + j * a.d / 2.0, U(rng) - 2);
        m[j] = int(U(rng));
        sm(j) = sv(j) + double(m[j]);
      }
      gam = std::max(gam, rel(std::exp(gindikin_gamma_log(sm, a) - gindikin_gamma_log(sv, a)),
                              poch_general(sv, m, a.d), 0.0));
    }
    add(out, "spherical", "Gamma ratio is the Pochhammer symbol", gam, 1e-10, tag);

    const int N = o.quick ? 20000 : 100000;
    const Element xc = random_cone(a, rng, 0.4, 1.4);
    const auto parts = partitions_upto(a.r, o.quick ? 4 : 6);
    std::vector<double> s1(parts.size(), 0.0), s2(parts.size(), 0.0);
    for (int it = 0; it < N; ++it) {
      const ComplexElement kx(Element(a, haar_KL_sample(a, rng) * xc.c));
      std::vector<double> minors(a.r + 1, 1.0);
      for (int l = 1; l <= a.r; ++l) minors[l] = peirce_minor(kx, l).real();
      for (size_t i = 0; i < parts.size(); ++i) {
        double v = 1.0;
        for (int l = 1; l <= a.r; ++l) v *= std::pow(minors[l], parts[i][l - 1] - (l < a.r ? parts[i][l] : 0));
        s1[i] += v;
        s2[i] += v * v;
      }
    }
    double worst = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
      const double mean = s1[i] / N, se = std::sqrt(std::max(s2[i] / N - mean * mean, 0.0) / N);
      const double dev = std::abs(phi_m(parts[i], xc).real() - mean);
      worst = std::max(worst, dev / (3 * se + 1e-10 * std::abs(mean)));
    }
    add(out, "spherical", "spherical polynomial against the K_L average (in units of 3 sigma)", worst, 1.0, tag);
  }
  return out;
}

std::vector<Check> verify_bessel(const VerifyOptions& o, json* table) {
  std::vector<Check> out;
  const Algebra R = Algebra::real_line();
  const bool real_line = o.algebra.empty() || Algebra::parse(o.algebra) == R;

  if (real_line) {
    double red = 0;
    for (double lam : {0.5, 1.0, 2.5})
      for (int i = 0; i <= 40; ++i) {
        const double x = 0.1 * i;
        const cd lhs = bessel_series(BesselParams{R, lam + 1, 0, Kind::I}, scalar(x * x / 4)).value / std::tgamma(lam + 1);
        const double rhs = x == 0 ? 1 / std::tgamma(lam + 1) : std::pow(x / 2, -lam) * boost::math::cyl_bessel_i(lam, x);
        red = std::max(red, std::abs(lhs - rhs) / std::abs(rhs));
      }
    add(out, "bessel", "classical reduction", red, 1e-10);

    double tube = 0;
    for (auto [lam, x] : std::vector<std::pair<double, double>>{{2, 1}, {0.8, 3}, {1.5, -2}, {3, 10}, {4, -20}}) {
      const cd ref = bessel_series(BesselParams{R, lam, 0, Kind::I}, scalar(x)).value;
      tube = std::max(tube, rel(tube_contour_oracle(lam, x), ref));
    }
    add(out, "bessel", "tube contour against series", tube, 1e-6);

    json rows = json::array();
    double agree = 0;
    const long long n = o.quick ? (1 << 16) : 1000000;
    for (auto [lam, k] : std::vector<std::pair<double, int>>{{1.5, 0}, {0.7, 1}, {3.0, 0}})
      for (double x : {0.5, 1.0, 2.0}) {
        BesselParams p{R, lam, k, Kind::I, true};
        const cd series = bessel_series(p, scalar(x * x)).value;
        const EvalResult mc = bessel_integral(p, scalar(x), mc_spec(n, o));
        const cd contour = tube_contour_oracle(lam, x * x);
        agree = std::max(agree, std::abs(mc.value - series) / std::max(3 * mc.error, 1e-3 * std::abs(series)));
        agree = std::max(agree, std::abs(contour - series) / (1e-6 * std::max(1.0, std::abs(series))));
        rows.push_back({{"lambda", lam}, {"k", k}, {"x", x}, {"series", series.real()}, {"integral", mc.value.real()},
                        {"integral_error", mc.error}, {"contour", contour.real()}});
      }
    if (table) *table = rows;
    add(out, "bessel", "series, integral and contour agree (in units of the tolerance)", agree, 1.0);
  }

  std::mt19937_64 rng(o.seed);
  double refl = 0, rank1 = 0;
  for (const Algebra& a : selected(o)) {
    const ComplexElement z = random_complex(a, rng, 0.8);
    BesselParams pj{a, cd(2.5, 0.4), 0, Kind::J}, pi = pj;
    pi.kind = Kind::I;
    refl = std::max(refl, std::abs(bessel_series(pj, z).value - bessel_series(pi, -z).value));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(a.r);
    v(0) = 2.0;
    const ComplexElement x(a, haar_KL_sample(a, rng).cast<cd>() * diagonal(a, v).c);
    const double y = 2 * std::sqrt(pnorm(x, 2.0)), lam = 2.5;
    const double ref = std::tgamma(lam) * std::pow(y / 2, 1 - lam) * boost::math::cyl_bessel_i(lam - 1, y);
    rank1 = std::max(rank1, std::abs(bessel_series(BesselParams{a, lam, 0, Kind::I}, x).value - ref) / ref);
  }
  add(out, "bessel", "J is I at the negated argument", refl, 0.0);
  add(out, "bessel", "rank-one arguments reduce to the classical function", rank1, 1e-10);

  double norm = 0;
  for (const Algebra& a : selected(o)) {
    const double lam = std::max(3.0, 2.0 * a.n / a.r);
    MCSpec mc = mc_spec(o.quick ? (1 << 15) : (1 << 18), o);
    mc.sampler = a.n > 4 ? Sampler::UniformBall : Sampler::SobolBox;
    const EvalResult r = bessel_integral(BesselParams{a, lam, 0, Kind::I, true}, ComplexElement::zero(a), mc);
    norm = std::max(norm, std::abs(r.value - 1.0) / (3 * r.error));
  }
  add(out, "bessel", "integral at the origin is one (in units of 3 sigma)", norm, 1.0);

  if (!real_line && Algebra::parse(o.algebra) == Algebra::symr(2)) {
    const Algebra a = Algebra::symr(2);
    BesselParams p{a, 4.0, 0, Kind::I};
    const ComplexElement x = diag2(a, 0.8, 0.3);
    const cd ref = bessel_series(p, jordan_product(x, x)).value;
    const EvalResult mc = bessel_integral(p, x, mc_spec(o.quick ? (1 << 18) : 10000000, o));
    add(out, "bessel", "integral against series in rank two (in units of the tolerance)",
        std::abs(mc.value - ref) / std::max(3 * mc.error, 2e-2 * std::abs(ref)), 1.0);
  }

  std::mt19937_64 brng(o.seed);
  const BoundReport rep = upper_bound_check(BesselParams{R, 3.0, 0, Kind::I}, o.quick ? 200 : 2000, brng);
  add(out, "bessel", "upper bound validation violations", rep.violations, 0, {{"c_star", rep.c_star}});
  return out;
}

std::vector<Check> verify_semigroup(const VerifyOptions& o) {
  std::vector<Check> out;
  const Algebra R = Algebra::real_line();

  double kern = 0;
  for (double lam : {1.5, 3.0})
    for (double t : {0.4, 1.1})
      for (double x : {0.3, 2.0})
        for (double y : {0.5, 4.0}) {
          const double s = std::sinh(t), c = 1 / std::tanh(t), z = 2 * std::sqrt(x * y) / s;
          const double ref = std::exp(-c * (x + y)) * std::tgamma(lam) * std::pow(z / 2, 1 - lam) *
                             boost::math::cyl_bessel_i(lam - 1, z);
          const cd got = kernel_K(KernelParams{R, lam, t}, Element(R, Eigen::VectorXd::Constant(1, x)),
                                  Element(R, Eigen::VectorXd::Constant(1, y)))
                             .value;
          kern = std::max(kern, std::abs(got - ref) / ref);
        }
  add(out, "semigroup", "kernel against the classical Bessel function", kern, 1e-11);

  std::vector<Eigen::VectorXd> grid;
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) grid.push_back(Eigen::VectorXd::Constant(1, x));
  const RadialFunction ex{[](const Eigen::VectorXd& v) { return cd(std::exp(-v.sum())); }, Growth::exponential(-1)};
  add(out, "semigroup", "semigroup law on the real line", semigroup_check(R, 3.0, 0.5, 0.5, ex, grid).discrepancy, 1e-6);

  std::mt19937_64 rng(o.seed);
  for (cd t : {cd(0.5, 0.0), cd(0.5, 1.0)}) {
    const auto rep = kernel_bound_check(KernelParams{R, 2.0, t}, 0, o.quick ? 100 : 300, rng);
    add(out, "semigroup", "kernel bound validation violations", rep.violations, 0,
        {{"t", {t.real(), t.imag()}}, {"c_star", rep.c_star}});
  }

  double slope = 0;
  for (double u : {0.7, 1.2}) {
    KernelParams p{R, 1.5, u};
    const double s[] = {6.0, 12.0, 24.0};
    double l[3];
    for (int i = 0; i < 3; ++i)
      l[i] = std::log(std::abs(kernel_K(p, Element(R, Eigen::VectorXd::Constant(1, s[i])),
                                        Element(R, Eigen::VectorXd::Constant(1, s[i]))).value));
    const double b = ((l[2] - l[1]) - (l[1] - l[0])) / (s[2] - 2 * s[1] + s[0]);
    slope = std::max(slope, std::abs(b / 2 + std::tanh(u / 2)) / std::tanh(u / 2));
  }
  add(out, "semigroup", "diagonal decay exponent is tanh(u/2)", slope, 1e-2);

  double hank = 0;
  for (double lam : {1.0, 2.5})
    for (double x : {0.0, 0.7, 3.0})
      hank = std::max(hank, std::abs(hankel_V_R(lam, [](double y) { return cd(std::exp(-y)); }, x) - std::exp(-x)));
  add(out, "semigroup", "Hankel transform fixes e^{-y}", hank, 1e-9);

  const std::vector<double> mg = {0.0, 0.5, 1.0, 2.0, 4.0};
  double meh = 0;
  for (int N : o.quick ? std::vector<int>{2} : std::vector<int>{2, 5})
    for (cd t : {cd(0.5, 0.0), cd(1.0, 0.3)})
      meh = std::max(meh, mehler_radial_check(N, t, [](double y) { return cd(std::exp(-y)); },
                                              Growth::exponential(-1), mg).discrepancy);
  add(out, "semigroup", "Mehler consistency", meh, 1e-6);
  return out;
}

}  // namespace cone::cli
