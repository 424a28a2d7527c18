#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "cone/bessel.hpp"
#include "cone/jack.hpp"

namespace cone {

const char* precision_name(Precision p) {
  switch (p) {
    case Precision::Auto: return "auto";
    case Precision::Double: return "double";
    case Precision::Quad: return "float128";
    case Precision::Digits100: return "bin_float_100";
  }
  return "?";
}

bool on_variety(const ComplexElement& z, int l) {
  Eigen::VectorXd t = singular_values(z);
  if (l >= t.size()) return true;
  const double t1 = t(0);
  const double cut = t1 < 1e-4 ? 1e-14 : 1e-10 * t1;
  for (int j = l; j < t.size(); ++j)
    if (t(j) > cut) return false;
  return true;
}

namespace {

using bf100c = boost::multiprecision::number<
    boost::multiprecision::complex_adaptor<boost::multiprecision::cpp_bin_float<100>>,
    boost::multiprecision::et_off>;

template <class R>
struct TierTraits;

template <>
struct TierTraits<double> {
  using C = std::complex<double>;
  static constexpr Precision tag = Precision::Double;
  static double eps() { return std::numeric_limits<double>::epsilon(); }
  static C make(double re, double im) { return {re, im}; }
};

template <>
struct TierTraits<quad> {
  using C = boost::multiprecision::complex128;
  static constexpr Precision tag = Precision::Quad;
  static double eps() { return 1.93e-34; }
  static C make(const quad& re, const quad& im) { return C(re, im); }
};

template <>
struct TierTraits<bf100> {
  using C = bf100c;
  static constexpr Precision tag = Precision::Digits100;
  static double eps() { return 1e-100; }
  static C make(const bf100& re, const bf100& im) { return C(re, im); }
};

// Coefficients of sum_m C_m(mu) / (|m|! (lambda)_m) over admissible m, collected on monomials m_nu
// and scaled per weight: the weight-k part is exp(logscale[k]) * sum_nu g[nu] m_nu(mu).
template <class R>
struct CoefTable {
  using C = typename TierTraits<R>::C;
  int built = -1;
  std::vector<int> start{0};
  std::vector<Partition> nus;
  std::vector<C> g;
  std::vector<double> logscale;
  std::vector<double> log_max_inv_poch;  // log max 1/|(lambda)_m| over admissible |m| = k
};

// log|(s)_m| and its phase for the generalized Pochhammer symbol.
template <class R>
void poch_log_phase(const R& lre, const R& lim, const Partition& m, int d, R& logabs,
                    typename TierTraits<R>::C& phase) {
  using std::abs;
  using std::log;
  using boost::multiprecision::abs;
  using boost::multiprecision::log;
  using C = typename TierTraits<R>::C;
  logabs = 0;
  phase = C(1);
  for (size_t j = 0; j < m.size(); ++j) {
    for (int i = 0; i < m[j]; ++i) {
      C f = TierTraits<R>::make(lre - R(int(j) * d) / 2 + i, lim);
      R a = abs(f);
      if (a == 0) throw MathError(ErrorCode::PochhammerZero, "(lambda)_m vanishes on an admissible partition");
      logabs += log(a);
      phase *= f / a;
    }
  }
}

template <class R>
class CoefCache {
 public:
  std::shared_ptr<const CoefTable<R>> get(const Algebra& a, int rank, cd lambda, int K) {
    auto key = std::make_tuple(a.r, a.d, rank, lambda.real(), lambda.imag());
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = map_[key];
    if (slot && slot->built >= K) return slot;
    auto next = std::make_shared<CoefTable<R>>(slot ? *slot : CoefTable<R>{});
    extend(*next, a, rank, lambda, K);
    slot = next;
    return slot;
  }

 private:
  void extend(CoefTable<R>& t, const Algebra& a, int rank, cd lambda, int K) {
    using std::exp;
    using boost::multiprecision::exp;
    using C = typename TierTraits<R>::C;
    JackTable<R>& jt = jack_table<R>(a.r, a.d);
    const R lre(lambda.real()), lim(lambda.imag());
    for (int k = t.built + 1; k <= K; ++k) {
      const auto& lv = jt.level(k);
      R logfact = 0;
      for (int j = 2; j <= k; ++j) logfact += log_r(R(j));
      struct Term {
        Partition m;
        R logw;
        C phase;
      };
      std::vector<Term> terms;
      R best = R(-1e300);
      double max_inv = -std::numeric_limits<double>::infinity();
      for (const Partition& m : lv.parts) {
        if (!admissible(m, rank)) continue;
        R lp;
        C ph;
        poch_log_phase(lre, lim, m, a.d, lp, ph);
        R lw = jt.log_cfactor(m) - logfact - lp;
        max_inv = std::max(max_inv, -static_cast<double>(lp));
        best = std::max(best, lw);
        terms.push_back({m, lw, C(1) / ph});
      }
      std::vector<C> g(lv.parts.size(), C(0));
      const double scale = terms.empty() ? 0.0 : static_cast<double>(best);
      for (const Term& tm : terms) {
        const int s = tm.m.back();
        Partition red = tm.m;
        for (int& v : red) v -= s;
        const auto& lr = jt.level(weight(red));
        const auto& row = lr.rows[lr.row_of[lr.index.at(red)]];
        const C w = tm.phase * C(exp(tm.logw - R(scale)));
        for (size_t j = 0; j < lr.parts.size(); ++j) {
          if (row[j] == 0) continue;
          Partition nu = lr.parts[j];
          for (int& v : nu) v += s;
          g[lv.index.at(nu)] += w * C(row[j]);
        }
      }
      for (size_t j = 0; j < lv.parts.size(); ++j) {
        if (g[j] == C(0)) continue;
        t.nus.push_back(lv.parts[j]);
        t.g.push_back(g[j]);
      }
      t.start.push_back(int(t.nus.size()));
      t.logscale.push_back(scale);
      t.log_max_inv_poch.push_back(max_inv);
      t.built = k;
    }
  }

  static R log_r(const R& x) {
    using std::log;
    using boost::multiprecision::log;
    return log(x);
  }

  std::mutex mu_;
  std::map<std::tuple<int, int, int, double, double>, std::shared_ptr<CoefTable<R>>> map_;
};

template <class R>
CoefCache<R>& coef_cache() {
  static CoefCache<R> cache;
  return cache;
}

// log of sup_{q >= 0} 1/|lambda - j d/2 + q| over the admissible rows.
// -log min |lambda - j d/2 + q| over rows j < rank and integers q >= q_min. A partition of weight k has a row of
// length at least ceil(k / rank); dropping its last box divides (lambda)_m by such a factor with q_min = ceil(k/rank) - 1.
double log_beta(const Algebra& a, int rank, cd lambda, int q_min) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < rank; ++j) {
    const cd base = lambda - double(j) * a.d / 2.0;
    double dmin = std::abs(base + double(q_min));
    const double q0 = std::floor(-base.real());
    for (double q : {q0, q0 + 1.0})
      if (q >= q_min) dmin = std::min(dmin, std::abs(base + q));
    best = std::max(best, -std::log(dmin));
  }
  return best;
}

struct TailState {
  const Algebra* alg;
  int rank;
  cd lambda;
  double log_s;  // log sum |mu_i|
};

// Certified bound on sum over |m| > K, given log M_{K+1}.
double tail_bound(const TailState& ts, int K, double log_m_next) {
  if (!std::isfinite(ts.log_s)) return 0.0;  // mu = 0
  if (!std::isfinite(log_m_next)) return 0.0; // nothing admissible beyond K
  const int q_min = (K + 2 + ts.rank - 1) / ts.rank - 1;
  const double ratio = std::exp(ts.log_s + log_beta(*ts.alg, ts.rank, ts.lambda, q_min)) / (K + 2);
  if (ratio >= 1) return std::numeric_limits<double>::infinity();
  const double lead = (K + 1) * ts.log_s + log_m_next - std::lgamma(K + 2.0);
  return std::exp(lead) / (1 - ratio);
}

template <class R>
EvalResult run_series(const Algebra& a, int rank, cd lambda, const Eigen::VectorXcd& mu,
                      const SeriesOptions& opt) {
  using std::abs;
  using std::exp;
  using std::log;
  using boost::multiprecision::abs;
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using Tr = TierTraits<R>;
  using C = typename Tr::C;

  const int r = a.r;
  double T = 0.0, s = 0.0;
  for (int i = 0; i < r; ++i) {
    T = std::max(T, std::abs(mu(i)));
    s += std::abs(mu(i));
  }
  const int K = opt.max_weight;
  std::vector<C> x(r);
  const R Tr_ = T > 0 ? R(T) : R(1);
  for (int i = 0; i < r; ++i) x[i] = Tr::make(R(mu(i).real()), R(mu(i).imag())) / C(Tr_);
  auto pw = power_table(x, std::max(K + 1, 1));
  const R logT = log(Tr_);

  TailState ts{&a, rank, lambda, s > 0 ? std::log(s) : -std::numeric_limits<double>::infinity()};

  EvalResult res;
  res.precision = Tr::tag;
  C acc(0);
  double S = 0.0;
  int k = 0;
  std::shared_ptr<const CoefTable<R>> tab;
  int have = -1;
  for (;; ++k) {
    if (have < k + 1) {
      have = std::min(K + 1, std::max(k + 16, 8));
      tab = coef_cache<R>().get(a, rank, lambda, have);
    }
    C part(0);
    double part_abs = 0.0;
    for (int i = tab->start[k]; i < tab->start[k + 1]; ++i) {
      C term = tab->g[i] * monomial_symmetric(tab->nus[i], pw);
      part += term;
      part_abs += static_cast<double>(abs(term));
    }
    const R lf = R(tab->logscale[k]) + R(k) * logT;
    if (Tr::tag == Precision::Double && static_cast<double>(lf) > 700)
      throw MathError(ErrorCode::ParameterOutOfRange, "series terms exceed double range");
    const R f = exp(lf);
    acc += C(f) * part;
    S += static_cast<double>(f) * part_abs;
    const double tail = tail_bound(ts, k, tab->log_max_inv_poch[k + 1]);
    const double cur = static_cast<double>(abs(acc));
    res.tail_bound = tail;
    if (tail <= opt.rel_tol * cur || (cur == 0 && tail == 0)) break;
    if (k >= K) {
      res.converged = false;
      break;
    }
  }
  res.max_weight_used = k;
  res.value = cd(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  res.roundoff = Tr::eps() * S * (4.0 + k);
  res.error = res.tail_bound + res.roundoff;
  res.error_kind = ErrorKind::TailBound;
  return res;
}

}  // namespace

EvalResult bessel_series(const BesselParams& p, const ComplexElement& z, const SeriesOptions& opt) {
  require_same(p.alg, z.alg);
  const int rank = rank_lambda(p.lambda, p.alg);
  if (!on_variety(z, rank))
    throw MathError(ErrorCode::ArgumentOffVariety,
                    "argument has more than rank(lambda) = " + std::to_string(rank) + " nonzero singular values");
  const ComplexElement arg = p.kind == Kind::J ? -z : z;
  Eigen::VectorXcd mu = jordan_eigenvalues(arg);
  // On the variety the discarded eigenvalues are zero up to rounding.
  if (rank < p.alg.r) {
    std::vector<int> order(mu.size());
    for (int i = 0; i < int(order.size()); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return std::abs(mu(i)) > std::abs(mu(j)); });
    for (int i = rank; i < int(order.size()); ++i) mu(order[i]) = 0.0;
  }
  auto ok = [&](const EvalResult& r) {
    return std::isfinite(r.roundoff) && r.roundoff <= opt.rel_tol * std::abs(r.value);
  };
  switch (opt.precision) {
    case Precision::Double: return run_series<double>(p.alg, rank, p.lambda, mu, opt);
    case Precision::Quad: return run_series<quad>(p.alg, rank, p.lambda, mu, opt);
    case Precision::Digits100: return run_series<bf100>(p.alg, rank, p.lambda, mu, opt);
    case Precision::Auto: break;
  }
  try {
    EvalResult r = run_series<double>(p.alg, rank, p.lambda, mu, opt);
    if (ok(r)) return r;
  } catch (const MathError& e) {
    if (e.code() != ErrorCode::ParameterOutOfRange) throw;
  }
  EvalResult r = run_series<quad>(p.alg, rank, p.lambda, mu, opt);
  if (ok(r)) return r;
  return run_series<bf100>(p.alg, rank, p.lambda, mu, opt);
}

cd bessel_I_real_line(double lambda, double y) {
  if (y == 0) return 1.0;
  const double g = std::tgamma(lambda);
  if (y > 0) {
    const double s = std::sqrt(y);
    return g * std::pow(s, 1 - lambda) * boost::math::cyl_bessel_i(lambda - 1, 2 * s);
  }
  const double s = std::sqrt(-y);
  return g * std::pow(s, 1 - lambda) * boost::math::cyl_bessel_j(lambda - 1, 2 * s);
}

cd bessel_J_real_line(double lambda, double y) { return bessel_I_real_line(lambda, -y); }

cd one_F1(int k, cd lambda, const ComplexElement& x, const ComplexElement& w) {
  require_same(x.alg, w.alg);
  const Algebra& a = x.alg;
  const int rank = rank_lambda(lambda, a);
  cd acc = 0.0;
  for (const Partition& m : partitions_upto(a.r, a.r * k)) {
    if (m[0] > k || !admissible(m, rank)) continue;
    const cd pl = poch_general(lambda, m, a.d);
    if (pl == cd(0)) throw MathError(ErrorCode::PochhammerZero, "(lambda)_m = 0 in 1F1");
    acc += poch_general(cd(-k), m, a.d) / pl * kernel_Km(m, x, w, a.r * k);
  }
  return acc;
}

DkCoefficients dk_exp_coeffs(int k, cd lambda, const ComplexElement& x, const ComplexElement& y) {
  require_same(x.alg, y.alg);
  const Algebra& a = x.alg;
  DkCoefficients out;
  out.general = 0.0;
  bool defined = true;
  for (const Partition& m : partitions_upto(a.r, a.r * k)) {
    if (m[0] > k) continue;
    Eigen::VectorXcd s(a.r);
    std::vector<int> rest(a.r);
    for (int j = 0; j < a.r; ++j) {
      s(j) = lambda + double(m[j]);
      rest[j] = k - m[j];
    }
    const double sign = weight(m) % 2 ? -1.0 : 1.0;
    out.general += sign * poch_general(cd(-k), m, a.d) * poch_general(s, rest, a.d) * kernel_Km(m, x, y, a.r * k);
    if (poch_general(lambda, m, a.d) == cd(0)) defined = false;
  }
  if (defined) {
    const std::vector<int> kk(a.r, k);
    out.reduced = poch_general(lambda, kk, a.d) * one_F1(k, lambda, -x, y);
  }
  return out;
}

}  // namespace cone
