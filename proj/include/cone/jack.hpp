#pragma once

#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include "cone/spherical.hpp"

namespace cone {

using quad = boost::multiprecision::float128;
using bf100 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                            boost::multiprecision::et_off>;

// Monomial expansion of Jack P polynomials with ≤ r parts, built one weight at a time.
// Only partitions with m_r = 0 carry a stored row; P_{m + s(1^r)} = (x_1...x_r)^s P_m.
template <class Real>
class JackTable {
 public:
  struct Level {
    int k = 0;
    std::vector<Partition> parts;        // colex
    std::map<Partition, int> index;
    std::vector<int> reduced;            // indices of parts with m_r = 0
    std::vector<std::vector<Real>> rows; // P coefficients of parts[reduced[i]] over parts
    std::vector<int> row_of;             // parts index -> row, or -1
  };

  JackTable(int r, Real alpha);

  int r() const { return r_; }
  const Real& alpha() const { return alpha_; }

  // Thread safe; builds missing levels under a lock.
  const Level& level(int k);

  // log(alpha^k k! / prod_s (alpha a(s) + l(s) + alpha)), the factor C_m / P_m.
  Real log_cfactor(const Partition& m) const;

  // Value of P_m at x, given powers[i][p] = x_i^p for p <= |m|.
  template <class C>
  C eval_P(const Partition& m, const std::vector<std::vector<C>>& powers);

 private:
  static constexpr int kMaxLevels = 4096;
  void build(int k);

  int r_;
  Real alpha_;
  std::mutex mu_;
  std::unique_ptr<std::atomic<const Level*>[]> slots_;
  std::vector<std::unique_ptr<Level>> owned_;
};

// Shared tables keyed by (r, d); d = 0 means a free alpha.
template <class Real>
JackTable<Real>& jack_table(int r, int d);
template <class Real>
JackTable<Real>& jack_table_alpha(int r, double alpha);

// Sum over the distinct permutations of nu of prod x_i^{nu_sigma(i)}.
template <class C>
C monomial_symmetric(const Partition& nu, const std::vector<std::vector<C>>& powers);

template <class C>
std::vector<std::vector<C>> power_table(const std::vector<C>& x, int kmax) {
  std::vector<std::vector<C>> pw(x.size(), std::vector<C>(kmax + 1));
  for (size_t i = 0; i < x.size(); ++i) {
    pw[i][0] = C(1);
    for (int p = 1; p <= kmax; ++p) pw[i][p] = pw[i][p - 1] * x[i];
  }
  return pw;
}

template <class C>
C monomial_symmetric(const Partition& nu, const std::vector<std::vector<C>>& powers) {
  std::vector<int> perm(nu.rbegin(), nu.rend());  // ascending
  C acc(0);
  do {
    C term(1);
    for (size_t i = 0; i < perm.size(); ++i)
      if (perm[i]) term *= powers[i][perm[i]];
    acc += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

template <class Real>
template <class C>
C JackTable<Real>::eval_P(const Partition& m, const std::vector<std::vector<C>>& powers) {
  const int s = m.back();
  Partition red = m;
  for (int& v : red) v -= s;
  const Level& lv = level(weight(red));
  const auto& row = lv.rows[lv.row_of[lv.index.at(red)]];
  C acc(0);
  for (size_t j = 0; j < lv.parts.size(); ++j)
    if (row[j] != 0) acc += C(row[j]) * monomial_symmetric(lv.parts[j], powers);
  if (s > 0) {
    C e(1);
    for (int i = 0; i < r_; ++i) e *= powers[i][1];
    for (int q = 0; q < s; ++q) acc *= e;
  }
  return acc;
}

extern template class JackTable<double>;
extern template class JackTable<quad>;
extern template class JackTable<bf100>;

}  // namespace cone
