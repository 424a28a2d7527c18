#include "cone/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "cone/jack.hpp"

namespace cone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gindikin_gamma(double s, const Algebra& a) { return std::exp(gindikin_gamma_log(cd(s), a).real()); }

double log_delta(const Eigen::VectorXd& t) { return t.array().log().sum(); }

}  // namespace

void KernelParams::validate() const {
  if (!(lambda > alg.n_over_r() - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "lambda must exceed n/r - 1");
  if (!(t.real() >= 0)) throw MathError(ErrorCode::ParameterOutOfRange, "Re t must be nonnegative");
  if (!(std::abs(std::sinh(t)) > 1e-8)) throw MathError(ErrorCode::ParameterOutOfRange, "t is too close to pi i Z");
}

double decay_exponent(cd t) {
  const double u = t.real(), v = t.imag();
  return std::sinh(u) / (std::cosh(u) + std::abs(std::cos(v)));
}

EvalResult kernel_K(const KernelParams& p, const Element& x, const Element& y, const SeriesOptions& opt) {
  p.validate();
  require_same(p.alg, x.alg);
  require_same(p.alg, y.alg);
  if (!in_closed_cone(x) || !in_closed_cone(y))
    throw MathError(ErrorCode::NotInCone, "kernel arguments must lie in the closed cone");
  const cd sh = std::sinh(p.t);
  const Element xy = sandwich(x, y);
  const ComplexElement z = (1.0 / (sh * sh)) * ComplexElement(xy);
  // Terms peak near weight sqrt(r |z|_1); leave room for the tail to fall below rel_tol.
  SeriesOptions so = opt;
  const double norm1 = std::max(trace(xy), 0.0) / std::norm(sh);
  so.max_weight = std::max(opt.max_weight, int(std::ceil(40 + 4 * std::sqrt(p.alg.r * norm1))));
  EvalResult r = bessel_series(BesselParams{p.alg, p.lambda, 0, Kind::I}, z, so);
  if (!r.converged)
    throw MathError(ErrorCode::WeightTooLarge, "kernel series did not converge within " + std::to_string(so.max_weight) +
                                                   " weights");
  const cd f = std::exp(-(std::cosh(p.t) / sh) * (trace(x) + trace(y)));
  r.value *= f;
  r.error *= std::abs(f);
  r.tail_bound *= std::abs(f);
  r.roundoff *= std::abs(f);
  return r;
}

// ---------------------------------------------------------------------------------------------
// Quadrature

void exp_sinh_rule(int level, double scale, double range, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  const double h = std::ldexp(1.0, -level);
  const double lo = std::asinh(2.0 / M_PI * 48.0);
  const int kmin = -int(std::ceil(lo / h));
  for (int k = kmin;; ++k) {
    const double s = k * h;
    const double e = std::exp(M_PI / 2 * std::sinh(s));
    const double xi = scale * e;
    if (xi > range && k > 0) break;
    x.push_back(xi);
    w.push_back(scale * h * M_PI / 2 * std::cosh(s) * e);
  }
}

namespace {

void build_nodes(const Algebra& a, int level, double scale, double range, std::vector<Eigen::VectorXd>& nodes,
                 std::vector<double>& weights) {
  std::vector<double> x, w;
  exp_sinh_rule(level, scale, range, x, w);
  const int r = a.r, m = int(x.size());
  std::vector<int> idx(r, 0);
  nodes.clear();
  weights.clear();
  while (true) {
    Eigen::VectorXd t(r);
    double acc = 0.0, wt = 1.0;
    for (int j = r - 1; j >= 0; --j) {
      acc += x[idx[j]];
      t(j) = acc;
      wt *= w[idx[j]];
    }
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) wt *= std::pow(t(i) - t(j), a.d);
    nodes.push_back(t);
    weights.push_back(wt);
    int p = 0;
    while (p < r && ++idx[p] == m) idx[p++] = 0;
    if (p == r) break;
  }
}

struct Calibration {
  double c = 1.0;
  double err = 0.0;
};

const Calibration& calibration(const Algebra& a) {
  static std::mutex mu;
  static std::map<std::string, Calibration> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(a.id());
  if (it != cache.end()) return it->second;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> w;
  build_nodes(a, a.r <= 2 ? 5 : 3, 1.0, 90.0, nodes, w);
  const double s0 = a.n_over_r();
  double q0 = 0.0, q1 = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double e = w[i] * std::exp(-nodes[i].sum());
    q0 += e;
    q1 += e * std::exp(log_delta(nodes[i]));
  }
  Calibration cal;
  cal.c = gindikin_gamma(s0, a) / q0;
  cal.err = std::abs(cal.c * q1 / gindikin_gamma(s0 + 1, a) - 1.0);
  if (!(cal.err <= 1e-6))
    throw MathError(ErrorCode::QuadratureNotConverged, "cone measure calibration failed for " + a.id());
  return cache.emplace(a.id(), cal).first->second;
}

}  // namespace

ConeQuadrature::ConeQuadrature(const Algebra& a, int level, double scale, double range) : alg_(a), level_(level) {
  build_nodes(a, level, scale, range, nodes_, weights_);
  const double c = c_omega(a);
  for (double& w : weights_) w *= c;
}

double ConeQuadrature::c_omega(const Algebra& a) { return calibration(a).c; }
double ConeQuadrature::calibration_error(const Algebra& a) { return calibration(a).err; }

// ---------------------------------------------------------------------------------------------
// K_L-averaged series

namespace {

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

struct WeightInfo {
  std::vector<Partition> parts;
  std::vector<double> log_cf;   // log C_m / P_m
  std::vector<double> log_q;    // -log C_m(e) - log (lambda)_m
  double max_log_q = kNegInf;
  double log_beta = kNegInf;    // max -log (lambda)_m
};

double log_poch_real(double lambda, const Partition& m, int d) {
  double acc = 0.0;
  for (size_t j = 0; j < m.size(); ++j) {
    const double s = lambda - double(j) * d / 2.0;
    acc += std::lgamma(s + m[j]) - std::lgamma(s);
  }
  return acc;
}

// C_m(x) for all partitions of weight <= K, in level order, x with |x|_1 <= 1.
template <class S>
void jack_values(JackTable<double>& jt, const Vec<S>& x, const std::vector<WeightInfo>& info,
                 std::vector<std::vector<S>>& out) {
  const int r = jt.r(), K = int(info.size()) - 1;
  std::vector<S> xs(x.data(), x.data() + r);
  auto pw = power_table(xs, K);
  std::vector<std::vector<S>> mono(K + 1);
  S e(1);
  for (int i = 0; i < r; ++i) e *= xs[i];
  out.assign(K + 1, {});
  for (int k = 0; k <= K; ++k) {
    const auto& lv = jt.level(k);
    mono[k].resize(lv.parts.size());
    for (size_t j = 0; j < lv.parts.size(); ++j) mono[k][j] = monomial_symmetric(lv.parts[j], pw);
    out[k].resize(info[k].parts.size());
    for (size_t q = 0; q < info[k].parts.size(); ++q) {
      const Partition& m = info[k].parts[q];
      const int s = m.back();
      Partition red = m;
      for (int& v : red) v -= s;
      const int wr = k - r * s;
      const auto& lr = jt.level(wr);
      const auto& row = lr.rows[lr.row_of[lr.index.at(red)]];
      S acc(0);
      for (size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0) acc += row[j] * mono[wr][j];
      S es(1);
      for (int i = 0; i < s; ++i) es *= e;
      out[k][q] = std::exp(info[k].log_cf[q]) * acc * es;
    }
  }
}

struct Prepared {
  std::vector<Eigen::VectorXcd> unit;
  std::vector<double> log_norm;  // log |p|_1, -inf for 0
};

template <class S>
Prepared prepare(const std::vector<Vec<S>>& pts) {
  Prepared p;
  for (const auto& v : pts) {
    const double n = v.cwiseAbs().sum();
    p.log_norm.push_back(n > 0 ? std::log(n) : kNegInf);
    p.unit.push_back(n > 0 ? Eigen::VectorXcd(v.template cast<cd>() / n) : Eigen::VectorXcd::Zero(v.size()));
  }
  return p;
}

template <class S>
Vec<S> to_scalar(const Eigen::VectorXcd& v) {
  if constexpr (std::is_same_v<S, double>) return v.real();
  else return v;
}

template <class S>
Mat<S> averaged_impl(const Algebra& a, double lambda, const std::vector<Vec<S>>& as, const std::vector<Vec<S>>& bs,
                     const std::vector<double>& fa, const std::vector<double>& fb, double rel_tol, int max_weight) {
  const int r = a.r;
  if (!(lambda > a.n_over_r() - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "lambda must exceed n/r - 1");
  JackTable<double>& jt = jack_table<double>(r, a.d);
  Prepared pa = prepare(as), pb = prepare(bs);
  const double la_max = *std::max_element(pa.log_norm.begin(), pa.log_norm.end());
  const double lb_max = *std::max_element(pb.log_norm.begin(), pb.log_norm.end());
  const double lam0 = lambda - (r - 1) * a.d / 2.0;
  // Removing the last box of a longest row: (lambda)_{m'} >= (lambda)_m (lam0 + ceil(|m'|/r) - 1).
  auto ratio_at = [&](double lsum, int k) {
    return std::exp(lsum) / ((k + 1.0) * (lam0 + (k + r) / r - 1.0));
  };

  // Pick K from the tail bound, filling per-weight data as we go.
  std::vector<WeightInfo> info;
  auto add_level = [&](int k) {
    WeightInfo wi;
    wi.parts = partitions_of(r, k);
    Eigen::VectorXd ones = Eigen::VectorXd::Constant(r, 1.0 / r);
    for (const Partition& m : wi.parts) wi.log_cf.push_back(jt.log_cfactor(m));
    info.push_back(wi);
    std::vector<std::vector<double>> c1;
    jack_values<double>(jt, ones, info, c1);
    WeightInfo& w = info.back();
    for (size_t q = 0; q < w.parts.size(); ++q) {
      const double lp = log_poch_real(lambda, w.parts[q], a.d);
      const double lq = -(std::log(c1[k][q]) + k * std::log(double(r))) - lp;
      w.log_q.push_back(lq);
      w.max_log_q = std::max(w.max_log_q, lq);
      w.log_beta = std::max(w.log_beta, -lp);
    }
  };
  add_level(0);
  int K = 0;
  const bool trivial = la_max == kNegInf || lb_max == kNegInf;
  if (!trivial) {
    const double lsum = la_max + lb_max;
    auto log_term = [&](int k, double log_beta) {
      double ma = kNegInf, mb = kNegInf;
      for (size_t i = 0; i < as.size(); ++i) ma = std::max(ma, k * pa.log_norm[i] - fa[i]);
      for (size_t j = 0; j < bs.size(); ++j) mb = std::max(mb, k * pb.log_norm[j] - fb[j]);
      return ma + mb + log_beta - std::lgamma(k + 1.0);
    };
    const double lim = std::log(rel_tol);
    for (;; ++K) {
      if (K + 1 > max_weight)
        throw MathError(ErrorCode::WeightTooLarge, "averaged series needs more than " + std::to_string(max_weight) +
                                                       " weights");
      add_level(K + 1);
      double lb = info[K + 1].log_beta;
      double acc = log_term(K + 1, lb);
      if (acc > lim) continue;
      // Sum the remaining terms explicitly until the global ratio drops below 1/2, then close geometrically.
      bool ok = true;
      for (int k = K + 1;; ++k) {
        const double ratio = ratio_at(lsum, k);
        const double lt = log_term(k, lb);
        if (ratio < 0.5) {
          const double tail = lt - std::log1p(-ratio);
          acc = k == K + 1 ? tail : std::max(acc, tail) + std::log1p(std::exp(-std::abs(acc - tail)));
          break;
        }
        if (k > K + 1) acc = std::max(acc, lt) + std::log1p(std::exp(-std::abs(acc - lt)));
        if (acc > lim) {
          ok = false;
          break;
        }
        lb -= std::log(lam0 + (k + r) / r - 1.0);
      }
      if (ok && acc <= lim) break;
    }
  }

  std::vector<int> offset(K + 2, 0);
  for (int k = 0; k <= K; ++k) offset[k + 1] = offset[k] + int(info[k].parts.size());
  const int M = offset[K + 1];
  info.resize(K + 1);

  auto fill = [&](const Prepared& p, bool left, Mat<S>& out) {
    out.resize(Eigen::Index(p.unit.size()), M);
    std::vector<std::vector<S>> vals;
    for (size_t i = 0; i < p.unit.size(); ++i) {
      jack_values<S>(jt, to_scalar<S>(p.unit[i]), info, vals);
      for (int k = 0; k <= K; ++k) {
        const double ck = info[k].max_log_q - std::lgamma(k + 1.0);
        const double mu = k == 0 || trivial ? 0.0 : k * (la_max - lb_max) / 2.0;
        double ls;
        if (p.log_norm[i] == kNegInf) ls = k == 0 ? 0.0 : kNegInf;
        else ls = k * p.log_norm[i];
        const double scale = std::exp(ls + ck / 2 + (left ? -mu : mu));
        for (size_t q = 0; q < vals[k].size(); ++q) {
          S v = scale * vals[k][q];
          if (!left) v *= std::exp(info[k].log_q[q] - info[k].max_log_q);
          out(Eigen::Index(i), offset[k] + int(q)) = v;
        }
      }
    }
  };
  Mat<S> U, V;
  fill(pa, true, U);
  fill(pb, false, V);
  return U * V.transpose();
}

}  // namespace

Eigen::MatrixXcd averaged_0F1(const Algebra& a, double lambda, const std::vector<Eigen::VectorXcd>& as,
                              const std::vector<Eigen::VectorXcd>& bs, const std::vector<double>& floor_a,
                              const std::vector<double>& floor_b, double rel_tol, int max_weight) {
  return averaged_impl<cd>(a, lambda, as, bs, floor_a, floor_b, rel_tol, max_weight);
}

namespace {

// Extra log-slack per row and column loosens the truncation where the entry is weighted down later.
Eigen::MatrixXcd kernel_impl(const KernelParams& p, const std::vector<Eigen::VectorXd>& xs,
                             const std::vector<Eigen::VectorXd>& ys, double rel_tol, const std::vector<double>& slack_x,
                             const std::vector<double>& slack_y) {
  p.validate();
  const cd sh = std::sinh(p.t), coth = std::cosh(p.t) / sh;
  const cd inv2 = 1.0 / (sh * sh);
  std::vector<double> fa, fb;
  for (size_t i = 0; i < xs.size(); ++i) fa.push_back(coth.real() * xs[i].sum() + (slack_x.empty() ? 0.0 : slack_x[i]));
  for (size_t j = 0; j < ys.size(); ++j) fb.push_back(coth.real() * ys[j].sum() + (slack_y.empty() ? 0.0 : slack_y[j]));
  Eigen::MatrixXcd G;
  if (p.t.imag() == 0) {
    std::vector<Eigen::VectorXd> ax;
    for (const auto& x : xs) ax.push_back(x * inv2.real());
    G = averaged_impl<double>(p.alg, p.lambda, ax, ys, fa, fb, rel_tol, 3000).cast<cd>();
  } else {
    std::vector<Eigen::VectorXcd> ax, by;
    for (const auto& x : xs) ax.push_back(x.cast<cd>() * inv2);
    for (const auto& y : ys) by.push_back(y.cast<cd>());
    G = averaged_impl<cd>(p.alg, p.lambda, ax, by, fa, fb, rel_tol, 3000);
  }
  const cd pre = std::exp(-double(p.alg.r) * p.lambda * std::log(sh));
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j)
      G(i, j) *= pre * std::exp(-coth * (xs[i].sum() + ys[j].sum()));
  return G;
}

// log(max s / s_i), capped so that vanishing weights stay finite.
std::vector<double> slack_from(const std::vector<double>& sig) {
  double m = 0.0;
  for (double v : sig) m = std::max(m, v);
  std::vector<double> out(sig.size(), 0.0);
  if (!(m > 0)) return out;
  for (size_t i = 0; i < sig.size(); ++i) out[i] = std::min(700.0, std::log(m / std::max(sig[i], m * 1e-300)));
  return out;
}

}  // namespace

Eigen::MatrixXcd radial_kernel(const KernelParams& p, const std::vector<Eigen::VectorXd>& xs,
                               const std::vector<Eigen::VectorXd>& ys, double rel_tol) {
  return kernel_impl(p, xs, ys, rel_tol, {}, {});
}

// ---------------------------------------------------------------------------------------------
// tau

namespace {

constexpr double kSeriesTol = 1e-13;
constexpr std::size_t kBlockEntries = std::size_t(1) << 22;
constexpr std::size_t kMaxEntries = std::size_t(1) << 28;

double decay_rate(const KernelParams& p, const Growth& g) {
  const double rc = (std::cosh(p.t) / std::sinh(p.t)).real();
  const double c = g.kind == Growth::Kind::Exponential ? rc - g.rate : rc;
  if (!(c > 1e-12))
    throw MathError(ErrorCode::GrowthIncompatible, "growth of phi is not dominated by the kernel at this t");
  return c;
}

ConeQuadrature nodes_for(const KernelParams& p, const Growth& g, double max_trace, int level) {
  const double c = decay_rate(p, g);
  const double beta = 2.0 * std::sqrt(max_trace) / std::abs(std::sinh(p.t));
  const double margin = 45.0 + (g.kind == Growth::Kind::Polynomial ? 2.0 * g.rate : 0.0) + p.alg.r * p.lambda;
  const double sq = (beta + std::sqrt(beta * beta + 4 * c * margin)) / (2 * c);
  const double range = sq * sq;
  return ConeQuadrature(p.alg, level, std::min(1.0 / c, range / 8), range);
}

Eigen::VectorXcd node_weights(const KernelParams& p, const ConeQuadrature& q, const std::vector<cd>& vals) {
  const double shift = p.lambda - p.alg.n_over_r();
  const double g = gindikin_gamma(p.lambda, p.alg);
  Eigen::VectorXcd wv(Eigen::Index(q.size()));
  for (size_t i = 0; i < q.size(); ++i)
    wv(Eigen::Index(i)) = q.weights()[i] * vals[i] * std::exp(shift * log_delta(q.nodes()[i])) / g;
  return wv;
}

std::vector<double> magnitudes(const Eigen::VectorXcd& v) {
  std::vector<double> out(size_t(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[size_t(i)] = std::abs(v(i));
  return out;
}

// Entry tolerances scale with the column weights, so the summed error stays below rel_tol |pre| max|w|.
double summed_tol(std::size_t count) { return 1e-3 * kSeriesTol / double(std::max<std::size_t>(count, 1)); }

std::vector<cd> apply_nodes(const KernelParams& p, const ConeQuadrature& q, const std::vector<cd>& vals,
                            const std::vector<Eigen::VectorXd>& grid, const std::vector<double>& row_slack = {}) {
  const Eigen::VectorXcd wv = node_weights(p, q, vals);
  const std::vector<double> col_slack = slack_from(magnitudes(wv));
  const std::size_t block = std::max<std::size_t>(1, kBlockEntries / std::max<std::size_t>(q.size(), 1));
  std::vector<cd> out;
  out.reserve(grid.size());
  for (std::size_t b = 0; b < grid.size(); b += block) {
    const std::size_t e = std::min(grid.size(), b + block);
    const std::vector<Eigen::VectorXd> rows(grid.begin() + std::ptrdiff_t(b), grid.begin() + std::ptrdiff_t(e));
    std::vector<double> rs;
    if (!row_slack.empty()) rs.assign(row_slack.begin() + std::ptrdiff_t(b), row_slack.begin() + std::ptrdiff_t(e));
    const Eigen::VectorXcd part = kernel_impl(p, rows, q.nodes(), summed_tol(q.size()), rs, col_slack) * wv;
    out.insert(out.end(), part.data(), part.data() + part.size());
  }
  return out;
}

double max_trace(const std::vector<Eigen::VectorXd>& pts) {
  double m = 0.0;
  for (const auto& v : pts) m = std::max(m, v.sum());
  return m;
}

int first_level(const Algebra& a, const TauOptions& opt) { return opt.min_level > 0 ? opt.min_level : (a.r == 1 ? 3 : 2); }

std::size_t node_estimate(const ConeQuadrature& q) { return q.size() << q.algebra().r; }

}  // namespace

std::vector<EvalResult> tau_apply(const KernelParams& p, const RadialFunction& phi,
                                  const std::vector<Eigen::VectorXd>& grid, const TauOptions& opt) {
  p.validate();
  decay_rate(p, phi.growth);
  const double X = max_trace(grid);
  std::vector<cd> prev;
  for (int level = first_level(p.alg, opt);; ++level) {
    ConeQuadrature q = nodes_for(p, phi.growth, X, level);
    if (q.size() > opt.max_nodes)
      throw MathError(ErrorCode::QuadratureNotConverged, "tau quadrature exceeded the node budget");
    std::vector<cd> vals(q.size());
    for (size_t i = 0; i < q.size(); ++i) vals[i] = phi(q.nodes()[i]);
    std::vector<cd> cur = apply_nodes(p, q, vals, grid);
    if (!prev.empty()) {
      bool ok = true;
      for (size_t g = 0; g < cur.size(); ++g)
        ok = ok && std::abs(cur[g] - prev[g]) <= opt.rel_tol * std::abs(cur[g]) + opt.abs_tol;
      if (ok) {
        std::vector<EvalResult> out(cur.size());
        for (size_t g = 0; g < cur.size(); ++g) {
          out[g].value = cur[g];
          out[g].error = std::abs(cur[g] - prev[g]);
          out[g].error_kind = ErrorKind::TailBound;
          out[g].samples = (long long)q.size();
        }
        return out;
      }
    }
    if (node_estimate(q) > opt.max_nodes)
      throw MathError(ErrorCode::QuadratureNotConverged, "tau quadrature did not settle within the node budget");
    prev = std::move(cur);
  }
}

EvalResult tau_apply(const KernelParams& p, const RadialFunction& phi, const Element& x, const TauOptions& opt) {
  require_same(p.alg, x.alg);
  if (!in_closed_cone(x)) throw MathError(ErrorCode::NotInCone, "tau is evaluated on the cone");
  Eigen::VectorXd t = spectral(x).values.cwiseMax(0.0);
  return tau_apply(p, phi, std::vector<Eigen::VectorXd>{t}, opt).front();
}

SemigroupReport semigroup_check(const Algebra& a, double lambda, cd s, cd t, const RadialFunction& phi,
                                const std::vector<Eigen::VectorXd>& grid, const TauOptions& opt) {
  if (!(lambda > 2.0 * a.n / a.r - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "the composition law needs lambda > 2n/r - 1");
  if (!(s.real() > 0 && t.real() > 0))
    throw MathError(ErrorCode::ParameterOutOfRange, "composition check needs Re s, Re t > 0");
  KernelParams ps{a, lambda, s}, pt{a, lambda, t}, pst{a, lambda, s + t};
  ps.validate();
  pt.validate();
  pst.validate();
  const std::vector<EvalResult> direct = tau_apply(pst, phi, grid, opt);

  const double X = max_trace(grid);
  std::vector<cd> prev;
  SemigroupReport rep;
  for (int level = first_level(a, opt);; ++level) {
    ConeQuadrature qo = nodes_for(ps, Growth::bounded(), X, level);
    ConeQuadrature qi = nodes_for(pt, phi.growth, max_trace(qo.nodes()), level);
    if (qo.size() > opt.max_nodes || qi.size() > opt.max_nodes || qo.size() * qi.size() > kMaxEntries)
      throw MathError(ErrorCode::QuadratureNotConverged, "composition quadrature exceeded the node budget");
    std::vector<cd> pv(qi.size());
    for (size_t i = 0; i < qi.size(); ++i) pv[i] = phi(qi.nodes()[i]);
    const Eigen::VectorXcd wo = node_weights(ps, qo, std::vector<cd>(qo.size(), 1.0));
    const Eigen::MatrixXcd Ko = kernel_impl(ps, grid, qo.nodes(), summed_tol(qo.size()), {}, slack_from(magnitudes(wo)));
    std::vector<double> sig(qo.size());
    for (size_t j = 0; j < qo.size(); ++j) sig[j] = Ko.col(Eigen::Index(j)).cwiseAbs().maxCoeff() * std::abs(wo(Eigen::Index(j)));
    const std::vector<cd> g = apply_nodes(pt, qi, pv, qo.nodes(), slack_from(sig));
    const Eigen::VectorXcd ov = Ko * wo.cwiseProduct(Eigen::Map<const Eigen::VectorXcd>(g.data(), Eigen::Index(g.size())));
    const std::vector<cd> cur(ov.data(), ov.data() + ov.size());
    bool ok = !prev.empty();
    double qerr = 0.0;
    if (ok) {
      for (size_t k = 0; k < cur.size(); ++k) {
        const double dlt = std::abs(cur[k] - prev[k]);
        qerr = std::max(qerr, dlt);
        ok = ok && dlt <= opt.rel_tol * std::abs(cur[k]) + opt.abs_tol;
      }
    }
    if (ok) {
      rep.level = level;
      rep.nodes = qo.size() + qi.size();
      rep.quadrature_error = qerr;
      double num = 0.0;
      for (size_t k = 0; k < cur.size(); ++k) {
        rep.rows.push_back({grid[k], cur[k], direct[k].value});
        rep.sup_direct = std::max(rep.sup_direct, std::abs(direct[k].value));
        num = std::max(num, std::abs(cur[k] - direct[k].value));
      }
      rep.discrepancy = num / std::max(rep.sup_direct, std::numeric_limits<double>::min());
      return rep;
    }
    if (node_estimate(qo) > opt.max_nodes || node_estimate(qi) > opt.max_nodes ||
        node_estimate(qo) * node_estimate(qi) > kMaxEntries)
      throw MathError(ErrorCode::QuadratureNotConverged, "composition quadrature did not settle");
    prev = cur;
  }
}

// ---------------------------------------------------------------------------------------------
// Kernel bound

KernelBoundReport kernel_bound_check(const KernelParams& p, int k, int sample_count, std::mt19937_64& rng,
                                     double max_trace_value) {
  p.validate();
  const Algebra& a = p.alg;
  if (!(p.lambda + k > 2.0 * a.n / a.r - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "lambda + k must exceed 2n/r - 1");
  KernelBoundReport rep;
  rep.kappa = decay_exponent(p.t);
  SeriesOptions so;
  so.max_weight = 4000;
  so.rel_tol = 1e-10;
  std::uniform_real_distribution<double> U(0.0, 1.0);

  auto row = [&](const Element& x, const Element& y) {
    KernelBoundRow rw;
    rw.tr_x = trace(x);
    rw.tr_y = trace(y);
    rw.abs_k = std::abs(kernel_K(p, x, y, so).value);
    rw.envelope = (1.0 + std::pow(rw.tr_x * rw.tr_y, a.r * k / 2.0)) * std::exp(-rep.kappa * (rw.tr_x + rw.tr_y));
    rw.ratio = rw.abs_k / rw.envelope;
    return rw;
  };
  auto random_with_trace = [&](double tr) {
    Element x = random_cone(a, rng, 0.0, 1.0);
    const double t0 = trace(x);
    return t0 > 0 ? (tr / t0) * x : x;
  };

  const Element e = Element::unit(a);
  for (int i = 0; i <= 25; ++i) {
    const double s = max_trace_value / a.r * i / 25.0;
    rep.calibration.push_back(row(s * e, s * e));
    rep.calibration.push_back(row(Element::zero(a), s * e));
  }
  for (int i = 0; i < sample_count; ++i)
    rep.calibration.push_back(row(random_with_trace(max_trace_value * U(rng)), random_with_trace(max_trace_value * U(rng))));
  for (const auto& rw : rep.calibration) rep.c_star = std::max(rep.c_star, rw.ratio);
  rep.calibration_count = int(rep.calibration.size());

  for (int i = 0; i < sample_count; ++i) {
    KernelBoundRow rw = row(random_with_trace(max_trace_value * U(rng)), random_with_trace(max_trace_value * U(rng)));
    rep.validation_max = std::max(rep.validation_max, rw.ratio);
    if (rw.ratio > rep.c_star * (1 + 1e-12)) ++rep.violations;
    rep.validation.push_back(rw);
  }
  rep.validation_count = sample_count;
  return rep;
}

}  // namespace cone
