#include "cone/algebra.hpp"

#include <charconv>
#include <cmath>

#include "cone/error.hpp"

namespace cone {

namespace {

const double kSqrt2 = std::sqrt(2.0);

int parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw MathError(ErrorCode::UnsupportedAlgebra, "bad algebra id");
  return v;
}

}  // namespace

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::SingularElement: return "SingularElement";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::MinorVanishes: return "MinorVanishes";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::WeightTooLarge: return "WeightTooLarge";
    case ErrorCode::NonIntegerDimension: return "NonIntegerDimension";
    case ErrorCode::ArgumentOffVariety: return "ArgumentOffVariety";
    case ErrorCode::PochhammerZero: return "PochhammerZero";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::UnsupportedAlgebra: return "UnsupportedAlgebra";
    case ErrorCode::GrowthIncompatible: return "GrowthIncompatible";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
  }
  return "Unknown";
}

const char* family_name(Family f) {
  switch (f) {
    case Family::SymR: return "SymR";
    case Family::HermC: return "HermC";
    case Family::Spin: return "Spin";
  }
  return "?";
}

Algebra Algebra::symr(int r) {
  if (r < 1) throw MathError(ErrorCode::UnsupportedAlgebra, "rank must be positive");
  return {Family::SymR, r, r * (r + 1) / 2, 1};
}

Algebra Algebra::hermc(int r) {
  if (r < 1) throw MathError(ErrorCode::UnsupportedAlgebra, "rank must be positive");
  return {Family::HermC, r, r * r, 2};
}

Algebra Algebra::spin(int n) {
  if (n < 3) throw MathError(ErrorCode::UnsupportedAlgebra, "spin factor needs n >= 3");
  return {Family::Spin, 2, n, n - 2};
}

Algebra Algebra::parse(std::string_view id) {
  if (id == "r" || id == "R") return real_line();
  if (id.substr(0, 4) == "symr") return symr(parse_int(id.substr(4)));
  if (id.substr(0, 5) == "hermc") return hermc(parse_int(id.substr(5)));
  if (id.substr(0, 4) == "spin") return spin(parse_int(id.substr(4)));
  throw MathError(ErrorCode::UnsupportedAlgebra, "unknown algebra id '" + std::string(id) + "'");
}

std::string Algebra::id() const {
  switch (family) {
    case Family::SymR: return r == 1 ? "r" : "symr" + std::to_string(r);
    case Family::HermC: return "hermc" + std::to_string(r);
    case Family::Spin: return "spin" + std::to_string(n);
  }
  return "?";
}

void require_same(const Algebra& a, const Algebra& b) {
  if (!(a == b))
    throw MathError(ErrorCode::AlgebraMismatch, a.id() + " vs " + b.id());
}

Element::Element(const Algebra& a, Eigen::VectorXd coords) : alg(a), c(std::move(coords)) {
  if (c.size() != a.n) throw MathError(ErrorCode::AlgebraMismatch, "coordinate count");
}

Element Element::zero(const Algebra& a) { return Element(a, Eigen::VectorXd::Zero(a.n)); }

Element Element::unit(const Algebra& a) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.n);
  if (a.family == Family::Spin) {
    c(0) = kSqrt2;
  } else {
    for (int i = 0; i < a.r; ++i) c(i) = 1.0;
  }
  return Element(a, c);
}

ComplexElement::ComplexElement(const Algebra& a, Eigen::VectorXcd coords)
    : alg(a), c(std::move(coords)) {
  if (c.size() != a.n) throw MathError(ErrorCode::AlgebraMismatch, "coordinate count");
}

ComplexElement::ComplexElement(const Element& x) : alg(x.alg), c(x.c.cast<cd>()) {}

ComplexElement ComplexElement::zero(const Algebra& a) {
  return ComplexElement(a, Eigen::VectorXcd::Zero(a.n));
}

Element ComplexElement::re() const { return Element(alg, c.real()); }
Element ComplexElement::im() const { return Element(alg, c.imag()); }
ComplexElement ComplexElement::conj() const { return ComplexElement(alg, c.conjugate()); }

bool ComplexElement::is_real(double tol) const {
  return c.imag().cwiseAbs().maxCoeff() <= tol;
}

ComplexElement operator+(const ComplexElement& a, const ComplexElement& b) {
  require_same(a.alg, b.alg);
  return ComplexElement(a.alg, a.c + b.c);
}
ComplexElement operator-(const ComplexElement& a, const ComplexElement& b) {
  require_same(a.alg, b.alg);
  return ComplexElement(a.alg, a.c - b.c);
}
ComplexElement operator-(const ComplexElement& a) { return ComplexElement(a.alg, -a.c); }
ComplexElement operator*(cd s, const ComplexElement& a) { return ComplexElement(a.alg, s * a.c); }
Element operator+(const Element& a, const Element& b) {
  require_same(a.alg, b.alg);
  return Element(a.alg, a.c + b.c);
}
Element operator-(const Element& a, const Element& b) {
  require_same(a.alg, b.alg);
  return Element(a.alg, a.c - b.c);
}
Element operator*(double s, const Element& a) { return Element(a.alg, s * a.c); }

Eigen::MatrixXcd to_matrix(const ComplexElement& z) {
  const Algebra& a = z.alg;
  if (!a.is_matrix()) throw MathError(ErrorCode::UnsupportedAlgebra, "no matrix view for spin");
  const int r = a.r;
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(r, r);
  for (int i = 0; i < r; ++i) Z(i, i) = z.c(i);
  int k = r;
  const cd I(0, 1);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      if (a.family == Family::SymR) {
        Z(i, j) = Z(j, i) = z.c(k++) / kSqrt2;
      } else {
        cd re = z.c(k++), im = z.c(k++);
        Z(i, j) = (re + I * im) / kSqrt2;
        Z(j, i) = (re - I * im) / kSqrt2;
      }
    }
  return Z;
}

ComplexElement from_matrix(const Algebra& a, const Eigen::MatrixXcd& Z) {
  if (!a.is_matrix()) throw MathError(ErrorCode::UnsupportedAlgebra, "no matrix view for spin");
  const int r = a.r;
  Eigen::VectorXcd c(a.n);
  for (int i = 0; i < r; ++i) c(i) = Z(i, i);
  int k = r;
  const cd I(0, 1);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      if (a.family == Family::SymR) {
        c(k++) = (Z(i, j) + Z(j, i)) / kSqrt2;
      } else {
        c(k++) = (Z(i, j) + Z(j, i)) / kSqrt2;
        c(k++) = -I * (Z(i, j) - Z(j, i)) / kSqrt2;
      }
    }
  return ComplexElement(a, c);
}

Element from_real_matrix(const Algebra& a, const Eigen::MatrixXd& X) {
  return from_matrix(a, X.cast<cd>()).re();
}

Eigen::VectorXcd spin_view(const ComplexElement& z) { return z.c / kSqrt2; }

ComplexElement from_spin_view(const Algebra& a, const Eigen::VectorXcd& v) {
  return ComplexElement(a, v * kSqrt2);
}

ComplexElement diagonal(const Algebra& a, const Eigen::VectorXcd& t) {
  if (t.size() != a.r) throw MathError(ErrorCode::AlgebraMismatch, "diagonal needs r values");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(a.n);
  if (a.family == Family::Spin) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(a.n);
    v(0) = (t(0) + t(1)) / 2.0;
    v(1) = (t(0) - t(1)) / 2.0;
    return from_spin_view(a, v);
  }
  for (int i = 0; i < a.r; ++i) c(i) = t(i);
  return ComplexElement(a, c);
}

Element diagonal(const Algebra& a, const Eigen::VectorXd& t) {
  return diagonal(a, Eigen::VectorXcd(t.cast<cd>())).re();
}

}  // namespace cone
