#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cone {

using cd = std::complex<double>;

enum class Family { SymR, HermC, Spin };

// A simple Euclidean Jordan algebra: Sym(r,R), Herm(r,C) or the spin factor R^{1,n-1}.
struct Algebra {
  Family family = Family::SymR;
  int r = 1;
  int n = 1;
  int d = 1;

  static Algebra symr(int r);
  static Algebra hermc(int r);
  static Algebra spin(int n);
  static Algebra real_line() { return symr(1); }
  // Accepts "r", "symr<r>", "hermc<r>", "spin<n>".
  static Algebra parse(std::string_view id);

  std::string id() const;
  double n_over_r() const { return double(n) / r; }
  double alpha() const { return 2.0 / d; }
  bool is_matrix() const { return family != Family::Spin; }

  friend bool operator==(const Algebra& a, const Algebra& b) {
    return a.family == b.family && a.r == b.r && a.n == b.n;
  }
};

const char* family_name(Family f);

// Coordinates are taken in a basis orthonormal for (x|y) = tr(xy).
//   SymR:  X_ii, then sqrt2*X_ij (i<j, row major)
//   HermC: X_ii, then sqrt2*Re X_ij, sqrt2*Im X_ij (i<j, row major)
//   Spin:  sqrt2*(x0, x_vec)
struct Element {
  Algebra alg;
  Eigen::VectorXd c;

  Element() = default;
  Element(const Algebra& a, Eigen::VectorXd coords);
  static Element zero(const Algebra& a);
  static Element unit(const Algebra& a);
};

struct ComplexElement {
  Algebra alg;
  Eigen::VectorXcd c;

  ComplexElement() = default;
  ComplexElement(const Algebra& a, Eigen::VectorXcd coords);
  ComplexElement(const Element& x);  // NOLINT: real embedding
  static ComplexElement zero(const Algebra& a);

  Element re() const;
  Element im() const;
  ComplexElement conj() const;
  bool is_real(double tol = 0.0) const;
};

ComplexElement operator+(const ComplexElement& a, const ComplexElement& b);
ComplexElement operator-(const ComplexElement& a, const ComplexElement& b);
ComplexElement operator-(const ComplexElement& a);
ComplexElement operator*(cd s, const ComplexElement& a);
Element operator+(const Element& a, const Element& b);
Element operator-(const Element& a, const Element& b);
Element operator*(double s, const Element& a);

void require_same(const Algebra& a, const Algebra& b);

// Matrix view (matrix families). For HermC the complexification is all r x r complex
// matrices, and conjugation of coordinates corresponds to Z -> Z^*.
Eigen::MatrixXcd to_matrix(const ComplexElement& z);
ComplexElement from_matrix(const Algebra& a, const Eigen::MatrixXcd& Z);
Element from_real_matrix(const Algebra& a, const Eigen::MatrixXd& X);

// Spin view (x0, x_vec) with x = x0 e + x_vec.
Eigen::VectorXcd spin_view(const ComplexElement& z);
ComplexElement from_spin_view(const Algebra& a, const Eigen::VectorXcd& v);

// Diagonal element sum_j t_j c_j in the standard frame.
Element diagonal(const Algebra& a, const Eigen::VectorXd& t);
ComplexElement diagonal(const Algebra& a, const Eigen::VectorXcd& t);

}  // namespace cone
