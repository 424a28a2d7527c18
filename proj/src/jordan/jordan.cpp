#include "cone/jordan.hpp"

#include <algorithm>
#include <cmath>

namespace cone {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Eigen::VectorXcd spin_product_view(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  Eigen::VectorXcd p(x.size());
  p(0) = (x.array() * y.array()).sum();
  p.tail(x.size() - 1) = x(0) * y.tail(y.size() - 1) + y(0) * x.tail(x.size() - 1);
  return p;
}

cd spin_delta_view(const Eigen::VectorXcd& v) {
  return v(0) * v(0) - (v.tail(v.size() - 1).array().square()).sum();
}

ComplexElement outer_frame(const Algebra& a, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  return from_matrix(a, u * v.transpose());
}

// Complex Gram-Schmidt completion of the first `have` columns of U.
void complete_unitary(Eigen::MatrixXcd& U, int have) {
  const int r = U.rows();
  int col = have;
  for (int e = 0; e < r && col < r; ++e) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(r, e);
    for (int j = 0; j < col; ++j) v -= U.col(j).dot(v) * U.col(j);
    double nv = v.norm();
    if (nv < 1e-8) continue;
    U.col(col++) = v / nv;
  }
}

SpectralData singular_symr(const ComplexElement& z, bool with_frame) {
  const int r = z.alg.r;
  Eigen::MatrixXcd Z = to_matrix(z);
  Eigen::MatrixXd A = Z.real(), B = Z.imag();
  Eigen::MatrixXd M(2 * r, 2 * r);
  M << A, B, B, -A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  SpectralData out;
  out.values.resize(r);
  Eigen::MatrixXcd U(r, r);
  const double top = std::max(es.eigenvalues()(2 * r - 1), 0.0);
  int have = 0;
  for (int j = 0; j < r; ++j) {
    int idx = 2 * r - 1 - j;
    double s = std::max(es.eigenvalues()(idx), 0.0);
    out.values(j) = s;
    if (s > 1e-13 * top && s > 0) {
      Eigen::VectorXd x = es.eigenvectors().col(idx).head(r);
      Eigen::VectorXd y = es.eigenvectors().col(idx).tail(r);
      Eigen::VectorXcd u = x.cast<cd>() + cd(0, 1) * y.cast<cd>();
      U.col(have++) = u / u.norm();
    }
  }
  if (!with_frame) return out;
  complete_unitary(U, have);
  for (int j = 0; j < r; ++j) out.frame.push_back(outer_frame(z.alg, U.col(j), U.col(j)));
  return out;
}

SpectralData singular_hermc(const ComplexElement& z, bool with_frame) {
  Eigen::MatrixXcd Z = to_matrix(z);
  SpectralData out;
  if (!with_frame) {
    out.values = Eigen::JacobiSVD<Eigen::MatrixXcd>(Z).singularValues();
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.values = svd.singularValues();
  for (int j = 0; j < z.alg.r; ++j)
    out.frame.push_back(outer_frame(z.alg, svd.matrixU().col(j), svd.matrixV().col(j).conjugate()));
  return out;
}

// Spin factor: in w = (v0, i v_vec) one has Delta = sum w_k^2 and (z|z) = 2|w|^2.
SpectralData singular_spin(const ComplexElement& z, bool with_frame) {
  const Algebra& a = z.alg;
  Eigen::VectorXcd v = spin_view(z);
  Eigen::VectorXcd w = v;
  w.tail(a.n - 1) *= cd(0, 1);
  const cd delta = (w.array() * w.array()).sum();
  const double theta = std::abs(delta) > 0 ? std::arg(delta) / 2 : 0.0;
  SpectralData out;
  out.values.resize(2);
  Eigen::VectorXcd rw = std::polar(1.0, -theta) * w;
  double phase = theta;
  if (rw.imag().norm() > rw.real().norm()) {
    rw *= cd(0, -1);
    phase += M_PI / 2;
  }
  Eigen::VectorXd A = rw.real(), B = rw.imag();
  double nA = A.norm(), nB = B.norm();
  Eigen::VectorXd f, g;
  if (nA > 0) {
    f = A / nA;
  } else {
    f = Eigen::VectorXd::Unit(a.n, 0);
  }
  if (nB > 1e-15 * std::max(nA, 1e-300)) {
    g = B / nB;
    g -= g.dot(f) * f;
    g.normalize();
  } else {
    g = Eigen::VectorXd::Zero(a.n);
    for (int e = 0; e < a.n; ++e) {
      Eigen::VectorXd cand = Eigen::VectorXd::Unit(a.n, e);
      cand -= cand.dot(f) * f;
      if (cand.norm() > 0.5) {
        g = cand.normalized();
        break;
      }
    }
  }
  out.values << nA + nB, std::abs(nA - nB);
  if (!with_frame) return out;
  const cd ph = std::polar(1.0, phase);
  Eigen::VectorXcd k1 = ph * (f.cast<cd>() + cd(0, 1) * g.cast<cd>()) / 2.0;
  Eigen::VectorXcd k2 = ph * (f.cast<cd>() - cd(0, 1) * g.cast<cd>()) / 2.0;
  auto to_elem = [&](Eigen::VectorXcd ww) {
    ww.tail(a.n - 1) *= cd(0, -1);
    return from_spin_view(a, ww);
  };
  out.frame.push_back(to_elem(k1));
  out.frame.push_back(to_elem(k2));
  return out;
}

}  // namespace

ComplexElement jordan_product(const ComplexElement& x, const ComplexElement& y) {
  require_same(x.alg, y.alg);
  if (x.alg.family == Family::Spin) {
    return from_spin_view(x.alg, spin_product_view(spin_view(x), spin_view(y)));
  }
  Eigen::MatrixXcd X = to_matrix(x), Y = to_matrix(y);
  return from_matrix(x.alg, (X * Y + Y * X) / 2.0);
}

Element jordan_product(const Element& x, const Element& y) {
  return jordan_product(ComplexElement(x), ComplexElement(y)).re();
}

LinearMap op_L(const ComplexElement& x) {
  const int n = x.alg.n;
  LinearMap m(n, n);
  for (int k = 0; k < n; ++k) {
    ComplexElement b(x.alg, Eigen::VectorXcd::Unit(n, k));
    m.col(k) = jordan_product(x, b).c;
  }
  return m;
}

LinearMap op_box(const ComplexElement& x, const ComplexElement& y) {
  LinearMap lx = op_L(x), ly = op_L(y);
  return op_L(jordan_product(x, y)) + lx * ly - ly * lx;
}

LinearMap op_P(const ComplexElement& x) {
  LinearMap lx = op_L(x);
  return 2.0 * lx * lx - op_L(jordan_product(x, x));
}

LinearMap op_P2(const ComplexElement& x, const ComplexElement& z) {
  LinearMap lx = op_L(x), lz = op_L(z);
  return lx * lz + lz * lx - op_L(jordan_product(x, z));
}

LinearMap op_B(const ComplexElement& x, const ComplexElement& y) {
  require_same(x.alg, y.alg);
  ComplexElement yb = y.conj();
  const int n = x.alg.n;
  return LinearMap::Identity(n, n) - 2.0 * op_box(x, yb) + op_P(x) * op_P(yb);
}

ComplexElement apply_map(const LinearMap& m, const ComplexElement& x) {
  return ComplexElement(x.alg, m * x.c);
}

cd trace(const ComplexElement& x) {
  if (x.alg.family == Family::Spin) return kSqrt2 * x.c(0);
  return x.c.head(x.alg.r).sum();
}

double trace(const Element& x) { return trace(ComplexElement(x)).real(); }

cd det_delta(const ComplexElement& x) {
  if (x.alg.family == Family::Spin) return spin_delta_view(spin_view(x));
  return to_matrix(x).determinant();
}

double det_delta(const Element& x) { return det_delta(ComplexElement(x)).real(); }

cd inner(const ComplexElement& x, const ComplexElement& y) {
  require_same(x.alg, y.alg);
  return y.c.dot(x.c);
}

double inner(const Element& x, const Element& y) {
  require_same(x.alg, y.alg);
  return x.c.dot(y.c);
}

SpectralData spectral(const Element& x) {
  const Algebra& a = x.alg;
  SpectralData out;
  out.values.resize(a.r);
  if (a.family == Family::Spin) {
    Eigen::VectorXd v = x.c / kSqrt2;
    Eigen::VectorXd u = v.tail(a.n - 1);
    double rho = u.norm();
    Eigen::VectorXd uh = rho > 0 ? Eigen::VectorXd(u / rho) : Eigen::VectorXd::Unit(a.n - 1, 0);
    out.values << v(0) + rho, v(0) - rho;
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXcd fv(a.n);
      fv(0) = 0.5;
      fv.tail(a.n - 1) = (0.5 * s * uh).cast<cd>();
      out.frame.push_back(from_spin_view(a, fv));
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_matrix(ComplexElement(x)));
  for (int j = 0; j < a.r; ++j) {
    int idx = a.r - 1 - j;
    out.values(j) = es.eigenvalues()(idx);
    Eigen::VectorXcd u = es.eigenvectors().col(idx);
    out.frame.push_back(from_matrix(a, u * u.adjoint()));
  }
  return out;
}

SpectralData singular(const ComplexElement& z, bool with_frame) {
  switch (z.alg.family) {
    case Family::SymR: return singular_symr(z, with_frame);
    case Family::HermC: return singular_hermc(z, with_frame);
    case Family::Spin: return singular_spin(z, with_frame);
  }
  return {};
}

Eigen::VectorXd singular_values(const ComplexElement& z) {
  const Algebra& a = z.alg;
  if (a.family == Family::Spin) return singular_spin(z, false).values;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(to_matrix(z)).singularValues();
}

Element inverse(const Element& x) {
  SpectralData sd = spectral(x);
  double big = sd.values.cwiseAbs().maxCoeff();
  if (big == 0 || sd.values.cwiseAbs().minCoeff() <= 1e-12 * big)
    throw MathError(ErrorCode::SingularElement, "Delta(x) vanishes");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(x.alg.n);
  for (int j = 0; j < x.alg.r; ++j) acc += (1.0 / sd.values(j)) * sd.frame[j].c;
  return Element(x.alg, acc.real());
}

ComplexElement inverse(const ComplexElement& x) {
  Eigen::VectorXd sv = singular_values(x);
  if (sv(0) == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw MathError(ErrorCode::SingularElement, "Delta(x) vanishes");
  if (x.alg.family == Family::Spin) {
    Eigen::VectorXcd v = spin_view(x);
    cd dl = spin_delta_view(v);
    v.tail(v.size() - 1) *= -1.0;
    return from_spin_view(x.alg, v / dl);
  }
  return from_matrix(x.alg, to_matrix(x).inverse());
}

bool in_cone(const Element& x) {
  Eigen::VectorXd t = spectral(x).values;
  return t(t.size() - 1) > kConeSlack * std::max(1.0, std::abs(t(0)));
}

bool in_closed_cone(const Element& x) {
  Eigen::VectorXd t = spectral(x).values;
  return t(t.size() - 1) >= -kConeSlack * std::max(1.0, std::abs(t(0)));
}

Element sqrt_cone(const Element& x) {
  SpectralData sd = spectral(x);
  const int r = x.alg.r;
  if (!(sd.values(r - 1) > kConeSlack * std::max(1.0, std::abs(sd.values(0)))))
    throw MathError(ErrorCode::NotInCone, "sqrt_cone needs all eigenvalues > 0");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(x.alg.n);
  for (int j = 0; j < r; ++j) acc += std::sqrt(sd.values(j)) * sd.frame[j].c;
  return Element(x.alg, acc.real());
}

ComplexElement power_int(const ComplexElement& x, int k) {
  if (k < 0) return power_int(inverse(x), -k);
  ComplexElement result = ComplexElement(Element::unit(x.alg));
  ComplexElement base = x;
  while (k > 0) {
    if (k & 1) result = jordan_product(result, base);
    k >>= 1;
    if (k) base = jordan_product(base, base);
  }
  return result;
}

Element power_int(const Element& x, int k) {
  if (k < 0) return power_int(inverse(x), -k);
  return power_int(ComplexElement(x), k).re();
}

double pnorm(const ComplexElement& z, double p) {
  Eigen::VectorXd t = singular_values(z);
  if (std::isinf(p)) return t.maxCoeff();
  if (p < 1) throw MathError(ErrorCode::ParameterOutOfRange, "pnorm needs p >= 1");
  double top = t.maxCoeff();
  if (top == 0) return 0.0;
  return top * std::pow((t / top).array().pow(p).sum(), 1.0 / p);
}

ComplexElement pnorm_dual_maximizer(const ComplexElement& z, double p) {
  SpectralData sd = singular(z, true);
  const int r = z.alg.r;
  Eigen::VectorXd s(r);
  if (std::isinf(p)) {
    s.setZero();
    s(0) = 1.0;
  } else if (p == 1.0) {
    s.setOnes();
  } else {
    double top = sd.values(0) > 0 ? sd.values(0) : 1.0;
    for (int j = 0; j < r; ++j) s(j) = std::pow(sd.values(j) / top, p - 1);
    double q = p / (p - 1);
    s /= std::pow(s.array().pow(q).sum(), 1.0 / q);
  }
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(z.alg.n);
  for (int j = 0; j < r; ++j) acc += s(j) * sd.frame[j].c;
  return ComplexElement(z.alg, acc);
}

cd peirce_minor(const ComplexElement& x, int l) {
  const Algebra& a = x.alg;
  if (l < 0 || l > a.r) throw MathError(ErrorCode::ParameterOutOfRange, "minor index");
  if (l == 0) return 1.0;
  if (a.family == Family::Spin) {
    Eigen::VectorXcd v = spin_view(x);
    return l == 1 ? v(0) + v(1) : spin_delta_view(v);
  }
  return to_matrix(x).topLeftCorner(l, l).determinant();
}

cd gen_power(const ComplexElement& x, const Eigen::VectorXcd& s) {
  const int r = x.alg.r;
  if (s.size() != r) throw MathError(ErrorCode::ParameterOutOfRange, "exponent length");
  cd out = 1.0;
  for (int l = 1; l <= r; ++l) {
    cd e = s(l - 1) - (l < r ? s(l) : cd(0));
    if (e == cd(0)) continue;
    cd m = peirce_minor(x, l);
    double ri = std::round(e.real());
    if (e.imag() == 0 && ri >= 0 && std::abs(e.real() - ri) < 1e-14) {
      out *= std::pow(m, int(ri));
      continue;
    }
    if (m == cd(0)) throw MathError(ErrorCode::MinorVanishes, "Delta_" + std::to_string(l) + " = 0");
    out *= std::exp(e * std::log(m));
  }
  return out;
}

double generic_norm_h(const ComplexElement& w) {
  Eigen::VectorXd t = singular_values(w);
  double h = 1.0;
  for (int j = 0; j < t.size(); ++j) h *= 1.0 - t(j) * t(j);
  if (!(h > 0)) throw MathError(ErrorCode::OutsideDomain, "h(w,w) <= 0");
  return h;
}

double generic_norm_h_detB(const ComplexElement& w) {
  cd det = op_B(w, w).determinant();
  if (!(det.real() > 0)) throw MathError(ErrorCode::OutsideDomain, "Det B(w,w) <= 0");
  return std::pow(det.real(), double(w.alg.r) / (2.0 * w.alg.n));
}

bool in_domain_D(const ComplexElement& w) { return singular_values(w)(0) < 1.0; }

namespace {

Element closed_cone_sqrt(const Element& x) {
  SpectralData sd = spectral(x);
  const int r = x.alg.r;
  const double scale = std::max(1.0, std::abs(sd.values(0)));
  if (sd.values(r - 1) < -kConeSlack * scale)
    throw MathError(ErrorCode::NotInCone, "sandwich needs x in the closed cone");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(x.alg.n);
  for (int j = 0; j < r; ++j) acc += std::sqrt(std::max(sd.values(j), 0.0)) * sd.frame[j].c;
  return Element(x.alg, acc.real());
}

}  // namespace

ComplexElement sandwich(const Element& x, const ComplexElement& y) {
  require_same(x.alg, y.alg);
  ComplexElement s(closed_cone_sqrt(x));
  ComplexElement sy = jordan_product(s, y);
  return 2.0 * jordan_product(s, sy) - jordan_product(jordan_product(s, s), y);
}

Element sandwich(const Element& x, const Element& y) {
  return sandwich(x, ComplexElement(y)).re();
}

Eigen::VectorXcd jordan_eigenvalues(const ComplexElement& z) {
  if (z.alg.family == Family::Spin) {
    Eigen::VectorXcd v = spin_view(z);
    cd q = std::sqrt(cd((v.tail(v.size() - 1).array().square()).sum()));
    Eigen::VectorXcd out(2);
    out << v(0) + q, v(0) - q;
    return out;
  }
  if (z.alg.r == 1) return z.c;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_matrix(z), false);
  return es.eigenvalues();
}

Eigen::MatrixXd haar_KL_sample(const Algebra& a, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  const int n = a.n;
  Eigen::MatrixXd out(n, n);
  if (a.family == Family::Spin) {
    const int m = n - 1;
    Eigen::MatrixXd G(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) G(i, j) = N(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
      if (R(j, j) < 0) Q.col(j) *= -1.0;
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    out.setZero();
    out(0, 0) = 1.0;
    out.bottomRightCorner(m, m) = Q;
    return out;
  }
  const int r = a.r;
  Eigen::MatrixXcd G(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      G(i, j) = a.family == Family::HermC ? cd(N(rng), N(rng)) : cd(N(rng), 0.0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  for (int j = 0; j < r; ++j) {
    cd d = qr.matrixQR()(j, j);
    if (std::abs(d) > 0) Q.col(j) *= d / std::abs(d);
  }
  for (int k = 0; k < n; ++k) {
    ComplexElement b(a, Eigen::VectorXcd::Unit(n, k));
    Eigen::MatrixXcd X = to_matrix(b);
    out.col(k) = from_matrix(a, Q * X * Q.adjoint()).c.real();
  }
  return out;
}

Element random_element(const Algebra& a, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::VectorXd c(a.n);
  for (int k = 0; k < a.n; ++k) c(k) = N(rng);
  return Element(a, c);
}

ComplexElement random_complex(const Algebra& a, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::VectorXcd c(a.n);
  for (int k = 0; k < a.n; ++k) c(k) = cd(N(rng), N(rng));
  return ComplexElement(a, c);
}

Element random_cone(const Algebra& a, std::mt19937_64& rng, double tmin, double tmax) {
  std::uniform_real_distribution<double> U(tmin, tmax);
  Eigen::VectorXd t(a.r);
  for (int j = 0; j < a.r; ++j) t(j) = U(rng);
  Element d = diagonal(a, t);
  return Element(a, haar_KL_sample(a, rng) * d.c);
}

}  // namespace cone
