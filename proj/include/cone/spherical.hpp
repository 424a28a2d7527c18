#pragma once

#include <vector>

#include "cone/algebra.hpp"
#include "cone/error.hpp"

namespace cone {

// Nonincreasing, padded with zeros to length r.
using Partition = std::vector<int>;

inline constexpr int kDefaultMaxWeight = 40;

int weight(const Partition& m);
// All partitions of length <= r and weight k, colexicographic.
std::vector<Partition> partitions_of(int r, int k);
// Graded by weight, colexicographic inside each weight.
std::vector<Partition> partitions_upto(int r, int K);

cd poch(cd s, int m);
// (s)_m = prod_j (s_j - (j-1)d/2)_{m_j}; m need not be a partition.
cd poch_general(const Eigen::VectorXcd& s, const std::vector<int>& m, int d);
cd poch_general(cd s, const std::vector<int>& m, int d);

// Principal log of Gamma with imaginary part continuous off the poles.
cd complex_lgamma(cd z);
cd gindikin_gamma_log(const Eigen::VectorXcd& s, const Algebra& a);
cd gindikin_gamma_log(cd s, const Algebra& a);
cd c_lambda(cd lambda, const Algebra& a);

// C-normalized Jack polynomial with parameter alpha at the given points.
cd jack_C(const Partition& m, double alpha, const Eigen::VectorXcd& points,
          int max_weight = kDefaultMaxWeight);

// C-normalized Jack polynomial of the algebra (alpha = 2/d).
cd jack_C(const Partition& m, const Algebra& a, const Eigen::VectorXcd& points,
          int max_weight = kDefaultMaxWeight);

cd phi_m(const Partition& m, const ComplexElement& z, int max_weight = kDefaultMaxWeight);

// Eigenvalues of z w^* in the Jordan sense; for Spin the roots of
// mu^2 - (z|w) mu + Delta(z) conj(Delta(w)).
Eigen::VectorXcd pair_spectrum(const ComplexElement& z, const ComplexElement& w);
cd kernel_Km(const Partition& m, const ComplexElement& z, const ComplexElement& w,
             int max_weight = kDefaultMaxWeight);

int rank_lambda(cd lambda, const Algebra& a);
bool wallach_member(double lambda, const Algebra& a);
// Partitions with m_{l+1} = 0.
bool admissible(const Partition& m, int rank);

double dim_dm(const Partition& m, const Algebra& a, int max_weight = kDefaultMaxWeight);

}  // namespace cone
