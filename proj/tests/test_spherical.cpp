#include <cmath>
#include <random>
#include <numeric>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "cone/jordan.hpp"
#include "cone/spherical.hpp"
#include "common.hpp"

using namespace cone;
using cone::testing::algebras;

namespace {

Eigen::VectorXcd random_points(std::mt19937_64& rng, int r) {
  std::normal_distribution<double> N;
  Eigen::VectorXcd t(r);
  for (int i = 0; i < r; ++i) t(i) = cd(N(rng), N(rng));
  return t;
}

// h_k via Newton's identities from power sums.
std::vector<cd> complete_homogeneous(const Eigen::VectorXcd& x, int K) {
  std::vector<cd> p(K + 1, 0.0), h(K + 1, 0.0);
  for (int k = 1; k <= K; ++k)
    for (int i = 0; i < x.size(); ++i) p[k] += std::pow(x(i), k);
  h[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    for (int i = 1; i <= k; ++i) h[k] += p[i] * h[k - i];
    h[k] /= double(k);
  }
  return h;
}

cd schur_jacobi_trudi(const Partition& m, const Eigen::VectorXcd& x) {
  const int r = int(m.size());
  auto h = complete_homogeneous(x, weight(m) + r);
  Eigen::MatrixXcd M(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      int idx = m[i] - i + j;
      M(i, j) = idx < 0 ? cd(0) : h[idx];
    }
  return M.determinant();
}

double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

}  // namespace

TEST_CASE("partition enumeration") {
  std::vector<Partition> p1 = partitions_upto(1, 3);
  CHECK(p1 == std::vector<Partition>{{0}, {1}, {2}, {3}});
  std::vector<Partition> p2 = partitions_upto(2, 2);
  CHECK(p2 == std::vector<Partition>{{0, 0}, {1, 0}, {2, 0}, {1, 1}});

  int brute = 0;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c)
        if (a + b + c <= 6) ++brute;
  auto p3 = partitions_upto(3, 6);
  CHECK(int(p3.size()) == brute);
  CHECK(std::set<Partition>(p3.begin(), p3.end()).size() == p3.size());
  for (size_t i = 1; i < p3.size(); ++i) CHECK(weight(p3[i - 1]) <= weight(p3[i]));
}

TEST_CASE("generalized Pochhammer symbols") {
  CHECK(poch_general(cd(2.7), {0, 0}, 2) == cd(1.0));
  CHECK(std::abs(poch_general(cd(3.0), {1, 1}, 2) - 6.0) < 1e-14);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  std::uniform_int_distribution<int> M(0, 4);
  for (const Algebra& a : algebras()) {
    for (int it = 0; it < 50; ++it) {
      Eigen::VectorXcd s(a.r);
      for (int j = 0; j < a.r; ++j) s(j) = cd(U(rng), U(rng));
      std::vector<int> m(a.r), q(a.r), mq(a.r), ms(a.r);
      for (int j = 0; j < a.r; ++j) {
        m[j] = M(rng);
        q[j] = M(rng);
        mq[j] = m[j] + q[j];
      }
      Eigen::VectorXcd sm = s;
      for (int j = 0; j < a.r; ++j) sm(j) += double(m[j]);
      cd lhs = poch_general(s, mq, a.d);
      cd rhs = poch_general(s, m, a.d) * poch_general(sm, q, a.d);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));

      Eigen::VectorXcd neg_rev(a.r), shifted(a.r);
      for (int j = 0; j < a.r; ++j) {
        neg_rev(j) = -s(a.r - 1 - j);
        ms[j] = m[a.r - 1 - j];
      }
      for (int j = 0; j < a.r; ++j) shifted(j) = s(j) - double(ms[j]) + a.n_over_r();
      cd l2 = poch_general(neg_rev, m, a.d);
      cd r2 = (std::accumulate(m.begin(), m.end(), 0) % 2 ? -1.0 : 1.0) * poch_general(shifted, ms, a.d);
      CHECK(std::abs(l2 - r2) <= 1e-10 * std::max(1.0, std::abs(l2)));
    }
  }
}

TEST_CASE("Gindikin gamma") {
  Algebra ra = Algebra::real_line();
  CHECK(std::abs(std::exp(gindikin_gamma_log(cd(2.0), ra)) - 1.0) < 1e-14);
  CHECK(std::abs(std::exp(gindikin_gamma_log(cd(-1.5), ra)) - std::tgamma(-1.5)) < 1e-12);
  CHECK_THROWS_AS(gindikin_gamma_log(cd(-2.0), ra), MathError);

  // HermC(2) in coordinates (a, b, sqrt2 Re z, sqrt2 Im z): the (u,v) plane integrates in polar
  // form to 2 pi dq with q = |z|^2 < ab.
  Algebra h2 = Algebra::hermc(2);
  const double s = 3.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto inner_q = [&](double a, double b) {
    const double ab = a * b;
    return GK::integrate([&](double q) { return std::pow(ab - q, s - 2); }, 0.0, ab);
  };
  // e^{-a-b} is below 1e-30 beyond 70
  double numeric = 2 * M_PI * GK::integrate([&](double a) {
    return GK::integrate([&](double b) { return std::exp(-a - b) * inner_q(a, b); }, 0.0, 70.0, 12, 1e-13);
  }, 0.0, 70.0, 12, 1e-13);
  CHECK(numeric == doctest::Approx(4 * M_PI).epsilon(1e-9));
  CHECK(std::exp(gindikin_gamma_log(cd(s), h2)).real() == doctest::Approx(numeric).epsilon(1e-9));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.3, 4);
  for (const Algebra& a : algebras()) {
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXcd sv(a.r), sm(a.r);
      std::vector<int> m(a.r);
      for (int j = 0; j < a.r; ++j) {
        sv(j) = cd(U(rng) + j * a.d / 2.0, U(rng) - 2);
        m[j] = int(U(rng));
        sm(j) = sv(j) + double(m[j]);
      }
      cd ratio = std::exp(gindikin_gamma_log(sm, a) - gindikin_gamma_log(sv, a));
      cd direct = poch_general(sv, m, a.d);
      CHECK(std::abs(ratio - direct) <= 1e-10 * std::abs(direct));
    }
  }
}

TEST_CASE("c_lambda") {
  Algebra ra = Algebra::real_line();
  for (double lam : {1.5, 2.0, 3.7}) {
    CHECK(c_lambda(cd(lam), ra).real() == doctest::Approx((lam - 1) / M_PI).epsilon(1e-13));
    const double k = 2;
    CHECK(c_lambda(cd(lam + 1 + k), ra).real() == doctest::Approx((lam + k) / M_PI).epsilon(1e-13));
  }
  // vol(D) = 1 / c_{2n/r}: the unit disc for V = R
  CHECK(1.0 / c_lambda(cd(2.0), ra).real() == doctest::Approx(M_PI));
}

TEST_CASE("Jack normalization") {
  std::mt19937_64 rng(17);
  for (int r = 1; r <= 3; ++r) {
    for (double alpha : {2.0, 1.0, 2.0 / 3.0, 0.5, 1.7}) {
      Eigen::VectorXcd t = random_points(rng, r);
      for (int k = 0; k <= 10; ++k) {
        cd sum = 0.0;
        for (const Partition& m : partitions_of(r, k)) sum += jack_C(m, alpha, t);
        cd expect = std::pow(t.sum(), k);
        CHECK(std::abs(sum - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
      }
    }
  }
  Eigen::VectorXcd x(2);
  x << cd(0.4, 0.1), cd(-1.3, 0.7);
  cd m2 = x(0) * x(0) + x(1) * x(1), m11 = x(0) * x(1);
  CHECK(std::abs(jack_C({2, 0}, 2.0, x) - (m2 + 2.0 / 3.0 * m11)) < 1e-14);
  CHECK(std::abs(jack_C({1, 1}, 2.0, x) - 4.0 / 3.0 * m11) < 1e-14);
  CHECK(jack_C({0, 0}, 2.0, x) == cd(1.0));
  CHECK_THROWS_AS(jack_C({41, 0}, 2.0, x), MathError);
}

TEST_CASE("Jack at alpha = 1 is proportional to Schur") {
  std::mt19937_64 rng(23);
  for (int r = 2; r <= 3; ++r) {
    for (const Partition& m : partitions_upto(r, 8)) {
      if (weight(m) == 0) continue;
      cd ref = 0.0;
      for (int it = 0; it < 4; ++it) {
        Eigen::VectorXcd t = random_points(rng, r);
        cd ratio = jack_C(m, 1.0, t) / schur_jacobi_trudi(m, t);
        if (it == 0) ref = ratio;
        CHECK(std::abs(ratio - ref) <= 1e-10 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("spherical polynomials against the K_L average") {
  const int N = 100000;
  for (const Algebra& a : algebras()) {
    std::mt19937_64 rng(101);
    Element x = random_cone(a, rng, 0.4, 1.4);
    auto parts = partitions_upto(a.r, 6);
    std::vector<double> sum(parts.size(), 0.0), sum2(parts.size(), 0.0);
    for (int it = 0; it < N; ++it) {
      ComplexElement kx(Element(a, haar_KL_sample(a, rng) * x.c));
      std::vector<double> minors(a.r + 1, 1.0);
      for (int l = 1; l <= a.r; ++l) minors[l] = peirce_minor(kx, l).real();
      for (size_t i = 0; i < parts.size(); ++i) {
        const Partition& m = parts[i];
        double v = 1.0;
        for (int l = 1; l <= a.r; ++l) v *= std::pow(minors[l], m[l - 1] - (l < a.r ? m[l] : 0));
        sum[i] += v;
        sum2[i] += v * v;
      }
    }
    for (size_t i = 0; i < parts.size(); ++i) {
      const double mean = sum[i] / N;
      const double se = std::sqrt(std::max(sum2[i] / N - mean * mean, 0.0) / N);
      const cd phi = phi_m(parts[i], x);
      INFO(a.id(), " m=", parts[i][0], ",", parts[i].back(), " mean=", mean, " phi=", phi.real(), " se=", se);
      CHECK(std::abs(phi.imag()) < 1e-12 * std::max(1.0, std::abs(phi)));
      CHECK(std::abs(phi.real() - mean) <= 3 * se + 1e-10 * std::abs(mean));
    }
  }
}

TEST_CASE("spherical polynomial basics") {
  std::mt19937_64 rng(31);
  for (const Algebra& a : algebras()) {
    ComplexElement e(Element::unit(a));
    ComplexElement z = random_complex(a, rng);
    for (const Partition& m : partitions_upto(a.r, 5)) {
      CHECK(std::abs(phi_m(m, e) - 1.0) < 1e-12);
      const cd c(0.7, -0.4);
      cd lhs = phi_m(m, c * z);
      cd rhs = std::pow(c, weight(m)) * phi_m(m, z);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("reproducing kernels") {
  std::mt19937_64 rng(37);
  for (const Algebra& a : algebras()) {
    ComplexElement z = random_complex(a, rng, 0.4), w = random_complex(a, rng, 0.4);
    ComplexElement e(Element::unit(a));
    ComplexElement x = random_complex(a, rng, 0.8);
    ComplexElement x2 = jordan_product(x, x);
    const cd target = std::exp(inner(z, w));
    double prev_err = 1e300;
    cd acc = 0.0;
    for (int k = 0; k <= 30; ++k) {
      for (const Partition& m : partitions_of(a.r, k)) {
        cd kzw = kernel_Km(m, z, w);
        if (k == 0) CHECK(kzw == cd(1.0));
        acc += kzw;
        CHECK(std::abs(kzw - std::conj(kernel_Km(m, w, z))) <= 1e-10 * std::max(1e-300, std::abs(kzw)) + 1e-300);
        if (k <= 8) {
          cd lhs = kernel_Km(m, x, x.conj());
          cd rhs = kernel_Km(m, x2, e);
          CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(rhs), 1e-12));
        }
      }
      double err = std::abs(acc - target);
      if (k % 5 == 0 && k >= 10 && prev_err > 1e-13 * std::abs(target)) {
        CHECK(err <= prev_err);
        prev_err = err;
      }
    }
    CHECK(std::abs(acc - target) <= 1e-12 * std::abs(target));
  }
}

TEST_CASE("rank of lambda and the Wallach set") {
  Algebra h2 = Algebra::hermc(2), h3 = Algebra::hermc(3), s3 = Algebra::symr(3);
  CHECK(rank_lambda(cd(0.0), h2) == 0);
  CHECK(rank_lambda(cd(-3.0), h3) == 0);
  CHECK(rank_lambda(cd(2.0), h3) == 2);
  CHECK(rank_lambda(cd(1.0), h2) == 1);
  CHECK(rank_lambda(cd(0.37), h3) == 3);
  CHECK(rank_lambda(cd(1.0, 0.5), h3) == 3);
  CHECK(rank_lambda(cd(0.5), s3) == 1);
  for (const Algebra& a : algebras()) {
    for (double lam : {0.0, -1.0, -2.0, 0.5, 1.0, 1.5, 2.0, 0.3, 2.7}) {
      const int rk = rank_lambda(cd(lam), a);
      // first vanishing Pochhammer factor among partitions of length rk + 1
      for (const Partition& m : partitions_upto(a.r, 6)) {
        cd p = poch_general(cd(lam), m, a.d);
        if (admissible(m, rk)) CHECK(std::abs(p) > 0);
      }
      if (rk < a.r) {
        bool hit = false;
        for (const Partition& m : partitions_upto(a.r, 6))
          if (admissible(m, rk + 1) && std::abs(poch_general(cd(lam), m, a.d)) == 0) hit = true;
        CHECK(hit);
      }
    }
  }
  CHECK(wallach_member(0.0, s3));
  CHECK_FALSE(wallach_member(0.75, s3));
  CHECK(wallach_member(0.5, s3));
  CHECK(wallach_member(1.01, s3));
  CHECK_FALSE(wallach_member(-0.5, s3));
}

TEST_CASE("dimensions d_m") {
  CHECK(dim_dm({0, 0}, Algebra::hermc(2)) == 1);
  CHECK(dim_dm({1, 0}, Algebra::hermc(2)) == 4);
  CHECK(dim_dm({2, 0}, Algebra::symr(2)) + dim_dm({1, 1}, Algebra::symr(2)) == 6);
  for (const Algebra& a : algebras()) {
    for (int k = 0; k <= 5; ++k) {
      double total = 0;
      for (const Partition& m : partitions_of(a.r, k)) total += dim_dm(m, a);
      CHECK(total == binomial(a.n + k - 1, k));
    }
  }
}
