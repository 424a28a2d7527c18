#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <boost/random/sobol.hpp>

#include "cone/bessel.hpp"
#include "cone/jack.hpp"

namespace cone {

const char* sampler_name(Sampler s) { return s == Sampler::SobolBox ? "sobol-box" : "uniform-ball"; }

Sampler parse_sampler(const std::string& s) {
  if (s == "sobol-box" || s == "sobol") return Sampler::SobolBox;
  if (s == "uniform-ball" || s == "ball") return Sampler::UniformBall;
  throw std::invalid_argument("unknown sampler '" + s + "'");
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONE_BESSEL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Coordinates to matrix entries, sampling box and the generic norm on D.
struct Geometry {
  Algebra a;
  std::vector<double> half_width;  // per real dimension (re, im interleaved)
  double box_volume = 1.0;
  double ball_radius = 1.0;
  double ball_volume = 1.0;
  struct Entry {
    int coord, i, j;
    cd factor;
  };
  std::vector<Entry> entries;

  explicit Geometry(const Algebra& alg) : a(alg) {
    half_width.resize(2 * a.n);
    for (int k = 0; k < a.n; ++k) {
      double hw = a.family == Family::Spin ? std::sqrt(2.0) : (k < a.r ? 1.0 : std::sqrt(2.0));
      half_width[2 * k] = half_width[2 * k + 1] = hw;
      box_volume *= 4 * hw * hw;
    }
    ball_radius = std::sqrt(double(a.r));
    ball_volume = std::exp(a.n * std::log(M_PI * a.r) - std::lgamma(a.n + 1.0));
    if (a.is_matrix()) {
      for (int k = 0; k < a.n; ++k) {
        Eigen::MatrixXcd M = to_matrix(ComplexElement(a, Eigen::VectorXcd::Unit(a.n, k)));
        for (int i = 0; i < a.r; ++i)
          for (int j = 0; j < a.r; ++j)
            if (M(i, j) != cd(0)) entries.push_back({k, i, j, M(i, j)});
      }
    }
  }

  double volume(Sampler s) const { return s == Sampler::SobolBox ? box_volume : ball_volume; }

  void matrix(const cd* c, Eigen::MatrixXcd& W) const {
    W.setZero(a.r, a.r);
    for (const Entry& e : entries) W(e.i, e.j) += e.factor * c[e.coord];
  }

  // h(w,w) when w lies in D, otherwise -1.
  double h(const cd* c, Eigen::MatrixXcd& W) const {
    if (a.family == Family::Spin) {
      double sq = 0.0;
      cd delta = c[0] * c[0];
      for (int k = 0; k < a.n; ++k) sq += std::norm(c[k]);
      for (int k = 1; k < a.n; ++k) delta -= c[k] * c[k];
      delta *= 0.5;
      const double h = 1.0 - sq + std::norm(delta);
      return (sq < 2.0 && h > 0.0) ? h : -1.0;
    }
    if (a.r == 1) {
      const double h = 1.0 - std::norm(c[0]);
      return h > 0 ? h : -1.0;
    }
    matrix(c, W);
    if (a.r == 2) {
      const double a00 = 1.0 - std::norm(W(0, 0)) - std::norm(W(0, 1));
      const double a11 = 1.0 - std::norm(W(1, 0)) - std::norm(W(1, 1));
      const cd a01 = -(W(0, 0) * std::conj(W(1, 0)) + W(0, 1) * std::conj(W(1, 1)));
      const double det = a00 * a11 - std::norm(a01);
      return (a00 > 0 && det > 0) ? det : -1.0;
    }
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(a.r, a.r) - W * W.adjoint();
    Eigen::LLT<Eigen::MatrixXcd> llt(A);
    if (llt.info() != Eigen::Success) return -1.0;
    double h = 1.0;
    for (int i = 0; i < a.r; ++i) {
      const double l = llt.matrixL()(i, i).real();
      if (!(l > 0)) return -1.0;
      h *= l * l;
    }
    return h;
  }
};

// Points of one (replicate, chunk) work item.
class PointStream {
 public:
  PointStream(const Geometry& g, const MCSpec& mc, int rep, long long start)
      : g_(g), mc_(mc), dim_(2 * g.a.n), sobol_(dim_), rng_() {
    if (mc.sampler == Sampler::SobolBox) {
      shift_.resize(dim_);
      for (int k = 0; k < dim_; ++k)
        shift_[k] = splitmix64(mc.seed ^ splitmix64(std::uint64_t(rep) * 0x100000001b3ULL + std::uint64_t(k)));
      sobol_.seed(static_cast<std::uint64_t>(start));
    } else {
      std::seed_seq seq{std::uint32_t(mc.seed), std::uint32_t(mc.seed >> 32), std::uint32_t(rep),
                        std::uint32_t(start), std::uint32_t(std::uint64_t(start) >> 32)};
      rng_.seed(seq);
    }
  }

  void next(cd* c) {
    if (mc_.sampler == Sampler::SobolBox) {
      for (int k = 0; k < dim_; ++k) {
        const std::uint64_t v = sobol_() ^ shift_[k];
        const double u = (double(v >> 11) + 0.5) * 0x1p-53;
        x_[k % 2] = g_.half_width[k] * (2 * u - 1);
        if (k % 2) c[k / 2] = cd(x_[0], x_[1]);
      }
      return;
    }
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U;
    double norm2 = 0.0;
    buf_.resize(dim_);
    for (int k = 0; k < dim_; ++k) {
      buf_[k] = N(rng_);
      norm2 += buf_[k] * buf_[k];
    }
    const double rad = g_.ball_radius * std::pow(U(rng_), 1.0 / dim_) / std::sqrt(norm2);
    for (int k = 0; k < dim_ / 2; ++k) c[k] = cd(buf_[2 * k] * rad, buf_[2 * k + 1] * rad);
  }

 private:
  const Geometry& g_;
  const MCSpec& mc_;
  int dim_;
  boost::random::sobol_engine<std::uint64_t, 64> sobol_;
  std::vector<std::uint64_t> shift_;
  std::mt19937_64 rng_;
  std::vector<double> buf_;
  double x_[2] = {0, 0};
};

struct ItemResult {
  cd sum = 0.0;
  long long accepted = 0;
};

long long per_replicate(const MCSpec& mc) {
  if (mc.samples < kReplicates) throw MathError(ErrorCode::ParameterOutOfRange, "need at least 16 samples");
  return (mc.samples + kReplicates - 1) / kReplicates;
}

}  // namespace

double enclosing_volume(const Algebra& a, Sampler s) { return Geometry(a).volume(s); }

DomainEstimate sample_D(const Algebra& a, const MCSpec& mc,
                        const std::function<void(const ComplexElement& w, double weight)>& sink) {
  Geometry g(a);
  const long long nrep = per_replicate(mc);
  const double vol = g.volume(mc.sampler);
  const double weight = vol / double(nrep * kReplicates);
  Eigen::VectorXcd c(a.n);
  Eigen::MatrixXcd W;
  std::vector<double> rep_vol(kReplicates);
  DomainEstimate out;
  for (int rep = 0; rep < kReplicates; ++rep) {
    PointStream ps(g, mc, rep, 0);
    long long acc = 0;
    for (long long i = 0; i < nrep; ++i) {
      ps.next(c.data());
      if (g.h(c.data(), W) > 0) {
        ++acc;
        if (sink) sink(ComplexElement(a, c), weight);
      }
    }
    out.accepted += acc;
    rep_vol[rep] = vol * double(acc) / double(nrep);
  }
  out.samples = nrep * kReplicates;
  double mean = 0.0, var = 0.0;
  for (double v : rep_vol) mean += v / kReplicates;
  for (double v : rep_vol) var += (v - mean) * (v - mean) / (kReplicates - 1);
  out.volume = mean;
  out.volume_error = std::sqrt(var / kReplicates);
  return out;
}

MCEstimate integrate_D(const Algebra& a, const MCSpec& mc,
                       const std::function<cd(const Eigen::VectorXcd& w, double h)>& f) {
  Geometry g(a);
  const long long nrep = per_replicate(mc);
  const long long chunk = std::max(1, mc.chunk);
  const long long nchunk = (nrep + chunk - 1) / chunk;
  const long long items = nchunk * kReplicates;
  std::vector<ItemResult> results(items);
  std::atomic<long long> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;

  auto worker = [&] {
    Eigen::VectorXcd c(a.n);
    Eigen::MatrixXcd W;
    for (;;) {
      const long long item = next.fetch_add(1);
      if (item >= items) return;
      const int rep = int(item / nchunk);
      const long long start = (item % nchunk) * chunk;
      const long long stop = std::min(nrep, start + chunk);
      try {
        PointStream ps(g, mc, rep, start);
        ItemResult r;
        for (long long i = start; i < stop; ++i) {
          ps.next(c.data());
          const double h = g.h(c.data(), W);
          if (h > 0) {
            ++r.accepted;
            r.sum += f(c, h);
          }
        }
        results[item] = r;
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (!failure) failure = std::current_exception();
        next = items;
      }
    }
  };
  const int nthreads = int(std::min<long long>(worker_count(mc.threads), items));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const double vol = g.volume(mc.sampler);
  std::vector<cd> rep_est(kReplicates, 0.0);
  MCEstimate out;
  for (long long item = 0; item < items; ++item) {
    rep_est[item / nchunk] += results[item].sum;
    out.accepted += results[item].accepted;
  }
  cd mean = 0.0;
  for (cd& v : rep_est) {
    v *= vol / double(nrep);
    mean += v / double(kReplicates);
  }
  double var = 0.0;
  for (const cd& v : rep_est) var += std::norm(v - mean) / (kReplicates - 1);
  out.value = mean;
  out.std_error = std::sqrt(var / kReplicates);
  out.samples = nrep * kReplicates;
  return out;
}

int effective_k(const BesselParams& p) {
  if (p.pin_k) return p.k;
  const double need = 2.0 * p.alg.n / p.alg.r - p.lambda.real();
  return std::max(p.k, int(std::ceil(need - 1e-12)));
}

namespace {

// sum over admissible m in the k-box of (-k)_m/(lambda)_m K^m, as a series in the pair spectrum.
class OneF1Kernel {
 public:
  OneF1Kernel(const Algebra& a, int k, cd lambda, const ComplexElement& neg_x) : a_(a), k_(k), x_(neg_x) {
    const int rank = rank_lambda(lambda, a);
    JackTable<double>& jt = jack_table<double>(a.r, a.d);
    std::map<Partition, cd> g;
    for (const Partition& m : partitions_upto(a.r, a.r * k)) {
      if (m[0] > k || !admissible(m, rank)) continue;
      const cd pl = poch_general(lambda, m, a.d);
      if (pl == cd(0)) throw MathError(ErrorCode::PochhammerZero, "(lambda)_m = 0 in 1F1");
      const int wt = weight(m);
      const cd coef = poch_general(cd(-k), m, a.d) / pl * std::exp(jt.log_cfactor(m) - std::lgamma(wt + 1.0));
      const int s = m.back();
      Partition red = m;
      for (int& v : red) v -= s;
      const auto& lv = jt.level(weight(red));
      const auto& row = lv.rows[lv.row_of[lv.index.at(red)]];
      for (size_t j = 0; j < lv.parts.size(); ++j) {
        if (row[j] == 0) continue;
        Partition nu = lv.parts[j];
        for (int& v : nu) v += s;
        g[nu] += coef * row[j];
      }
    }
    for (auto& [nu, c] : g) {
      nus_.push_back(nu);
      g_.push_back(c);
    }
    if (a.is_matrix()) X_ = to_matrix(neg_x);
    else if (a.family == Family::Spin) delta_x_ = det_delta(neg_x);
  }

  cd operator()(const Eigen::VectorXcd& w) const {
    if (k_ == 0) return 1.0;
    std::vector<cd> mu = spectrum(w);
    auto pw = power_table(mu, a_.r * k_ + 1);
    cd acc = 0.0;
    for (size_t i = 0; i < nus_.size(); ++i) acc += g_[i] * monomial_symmetric(nus_[i], pw);
    return acc;
  }

 private:
  std::vector<cd> spectrum(const Eigen::VectorXcd& w) const {
    if (a_.family == Family::Spin) {
      const cd s = w.dot(x_.c);
      cd dw = w(0) * w(0);
      for (int k = 1; k < a_.n; ++k) dw -= w(k) * w(k);
      const cd p = delta_x_ * std::conj(0.5 * dw);
      const cd disc = std::sqrt(s * s - 4.0 * p);
      return {(s + disc) / 2.0, (s - disc) / 2.0};
    }
    if (a_.r == 1) return {x_.c(0) * std::conj(w(0))};
    Eigen::MatrixXcd M = X_ * to_matrix(ComplexElement(a_, w)).adjoint();
    if (a_.r == 2) {
      const cd tr = M(0, 0) + M(1, 1), det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
      const cd disc = std::sqrt(tr * tr - 4.0 * det);
      return {(tr + disc) / 2.0, (tr - disc) / 2.0};
    }
    Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(M, false).eigenvalues();
    return std::vector<cd>(ev.data(), ev.data() + ev.size());
  }

  Algebra a_;
  int k_;
  ComplexElement x_;
  Eigen::MatrixXcd X_;
  cd delta_x_ = 0.0;
  std::vector<Partition> nus_;
  std::vector<cd> g_;
};

}  // namespace

EvalResult bessel_integral(const BesselParams& p, const ComplexElement& x, const MCSpec& mc) {
  require_same(p.alg, x.alg);
  const Algebra& a = p.alg;
  const int rank = rank_lambda(p.lambda, a);
  if (!on_variety(x, rank))
    throw MathError(ErrorCode::ArgumentOffVariety,
                    "argument has more than rank(lambda) = " + std::to_string(rank) + " nonzero singular values");
  const int k = effective_k(p);
  const double two_n_r = 2.0 * a.n / a.r;
  if (!(p.lambda.real() + k > two_n_r - 1))
    throw MathError(ErrorCode::ParameterOutOfRange,
                    "Re(lambda) + k = " + std::to_string(p.lambda.real() + k) + " must exceed 2n/r - 1 = " +
                        std::to_string(two_n_r - 1));
  const ComplexElement xe = p.kind == Kind::J ? cd(0, 1) * x : x;
  const cd c = c_lambda(p.lambda + double(k), a);
  const cd expo = p.lambda + double(k) - two_n_r;
  OneF1Kernel f1(a, k, p.lambda, -xe);
  const Eigen::VectorXcd xc = xe.c;
  auto integrand = [&](const Eigen::VectorXcd& w, double h) -> cd {
    cd lin = 0.0;
    for (int i = 0; i < a.n; ++i) lin += xc(i) * w(i).real();
    const cd hp = expo == cd(0) ? cd(1) : std::exp(expo * std::log(h));
    return f1(w) * std::exp(2.0 * lin) * hp;
  };
  MCEstimate est = integrate_D(a, mc, integrand);
  EvalResult out;
  out.value = c * est.value;
  out.error = std::abs(c) * est.std_error;
  out.error_kind = ErrorKind::StandardError;
  out.samples = est.samples;
  out.accepted = est.accepted;
  out.k_used = k;
  return out;
}

}  // namespace cone
