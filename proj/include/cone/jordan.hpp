#pragma once

#include <random>
#include <vector>

#include "cone/algebra.hpp"
#include "cone/error.hpp"

namespace cone {

using LinearMap = Eigen::MatrixXcd;

inline constexpr double kConeSlack = 1e-12;

ComplexElement jordan_product(const ComplexElement& x, const ComplexElement& y);
Element jordan_product(const Element& x, const Element& y);

LinearMap op_L(const ComplexElement& x);
LinearMap op_box(const ComplexElement& x, const ComplexElement& y);
LinearMap op_P(const ComplexElement& x);
LinearMap op_P2(const ComplexElement& x, const ComplexElement& z);
LinearMap op_B(const ComplexElement& x, const ComplexElement& y);
ComplexElement apply_map(const LinearMap& m, const ComplexElement& x);

cd trace(const ComplexElement& x);
double trace(const Element& x);
cd det_delta(const ComplexElement& x);
double det_delta(const Element& x);
// (x|y) = tr(x ybar), antilinear in y.
cd inner(const ComplexElement& x, const ComplexElement& y);
double inner(const Element& x, const Element& y);

struct SpectralData {
  Eigen::VectorXd values;               // descending
  std::vector<ComplexElement> frame;    // c_j, or k c_j in the complex case
};

SpectralData spectral(const Element& x);
SpectralData singular(const ComplexElement& z, bool with_frame = true);
Eigen::VectorXd singular_values(const ComplexElement& z);

Element inverse(const Element& x);
ComplexElement inverse(const ComplexElement& x);
Element sqrt_cone(const Element& x);
Element power_int(const Element& x, int k);
ComplexElement power_int(const ComplexElement& x, int k);
bool in_cone(const Element& x);
bool in_closed_cone(const Element& x);

double pnorm(const ComplexElement& z, double p);
// y with |y|_q = 1 and (z|y) = |z|_p, built on the frame of z.
ComplexElement pnorm_dual_maximizer(const ComplexElement& z, double p);

cd peirce_minor(const ComplexElement& x, int l);
cd gen_power(const ComplexElement& x, const Eigen::VectorXcd& s);

// h(w,w) = prod (1 - t_j^2); throws OutsideDomain if not positive.
double generic_norm_h(const ComplexElement& w);
// (Det B(w,w))^{r/(2n)} assembled from the operator B.
double generic_norm_h_detB(const ComplexElement& w);
bool in_domain_D(const ComplexElement& w);

Element sandwich(const Element& x, const Element& y);
ComplexElement sandwich(const Element& x, const ComplexElement& y);

Eigen::VectorXcd jordan_eigenvalues(const ComplexElement& z);

// Haar automorphism in K_L as a real orthogonal map on coordinates.
Eigen::MatrixXd haar_KL_sample(const Algebra& a, std::mt19937_64& rng);

// Random test data.
Element random_element(const Algebra& a, std::mt19937_64& rng, double scale = 1.0);
ComplexElement random_complex(const Algebra& a, std::mt19937_64& rng, double scale = 1.0);
Element random_cone(const Algebra& a, std::mt19937_64& rng, double tmin, double tmax);

}  // namespace cone
