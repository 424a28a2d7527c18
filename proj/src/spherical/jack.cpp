#include "cone/jack.hpp"

#include <algorithm>
#include <tuple>

namespace cone {

template <class Real>
JackTable<Real>::JackTable(int r, Real alpha)
    : r_(r), alpha_(alpha), slots_(new std::atomic<const Level*>[kMaxLevels]) {
  for (int k = 0; k < kMaxLevels; ++k) slots_[k].store(nullptr, std::memory_order_relaxed);
}

template <class Real>
const typename JackTable<Real>::Level& JackTable<Real>::level(int k) {
  if (k < 0 || k >= kMaxLevels)
    throw MathError(ErrorCode::WeightTooLarge, "weight " + std::to_string(k) + " exceeds table capacity");
  if (const Level* p = slots_[k].load(std::memory_order_acquire)) return *p;
  std::lock_guard<std::mutex> lock(mu_);
  if (!slots_[k].load(std::memory_order_relaxed)) build(k);
  return *slots_[k].load(std::memory_order_acquire);
}

template <class Real>
Real JackTable<Real>::log_cfactor(const Partition& m) const {
  using std::log;
  using boost::multiprecision::log;
  const int k = weight(m);
  Real acc = Real(k) * log(alpha_);
  for (int j = 2; j <= k; ++j) acc += log(Real(j));
  for (int i = 0; i < int(m.size()); ++i) {
    for (int j = 0; j < m[i]; ++j) {
      int arm = m[i] - j - 1;
      int leg = 0;
      for (int q = i + 1; q < int(m.size()) && m[q] > j; ++q) ++leg;
      acc -= log(alpha_ * arm + leg + alpha_);
    }
  }
  return acc;
}

template <class Real>
void JackTable<Real>::build(int k) {
  auto lv = std::make_unique<Level>();
  lv->k = k;
  lv->parts = partitions_of(r_, k);
  for (int i = 0; i < int(lv->parts.size()); ++i) lv->index[lv->parts[i]] = i;
  lv->row_of.assign(lv->parts.size(), -1);

  // Parts in decreasing lex order; each coefficient depends only on lex-larger ones.
  std::vector<int> lex(lv->parts.size());
  for (int i = 0; i < int(lex.size()); ++i) lex[i] = i;
  std::sort(lex.begin(), lex.end(), [&](int a, int b) { return lv->parts[a] > lv->parts[b]; });

  auto energy = [&](const Partition& p) {
    Real e = 0;
    for (int i = 0; i < r_; ++i) e += alpha_ / 2 * Real(p[i]) * p[i] - Real(i) * p[i];
    return e;
  };
  auto dominated = [](const Partition& nu, const Partition& lam) {
    int a = 0, b = 0;
    for (size_t i = 0; i < nu.size(); ++i) {
      a += nu[i];
      b += lam[i];
      if (a > b) return false;
    }
    return true;
  };

  for (int li = 0; li < int(lv->parts.size()); ++li) {
    const Partition& lam = lv->parts[li];
    if (k > 0 && lam.back() != 0) continue;
    std::vector<Real> row(lv->parts.size(), Real(0));
    const Real elam = energy(lam);
    row[li] = 1;
    for (int idx : lex) {
      const Partition& nu = lv->parts[idx];
      if (!(nu < lam) || !dominated(nu, lam)) continue;
      Real acc = 0;
      for (int i = 0; i < r_; ++i) {
        for (int j = i + 1; j < r_; ++j) {
          for (int t = 1; t <= nu[j]; ++t) {
            Partition mu = nu;
            mu[i] += t;
            mu[j] -= t;
            std::sort(mu.begin(), mu.end(), std::greater<int>());
            auto it = lv->index.find(mu);
            if (it == lv->index.end()) continue;
            const Real& c = row[it->second];
            if (c != 0) acc += Real(nu[i] - nu[j] + 2 * t) * c;
          }
        }
      }
      if (acc != 0) row[idx] = acc / (elam - energy(nu));
    }
    lv->row_of[li] = int(lv->rows.size());
    lv->reduced.push_back(li);
    lv->rows.push_back(std::move(row));
  }
  slots_[k].store(lv.get(), std::memory_order_release);
  owned_.push_back(std::move(lv));
}

namespace {

template <class Real>
struct Registry {
  std::mutex mu;
  std::map<std::tuple<int, int, double>, std::unique_ptr<JackTable<Real>>> tables;

  JackTable<Real>& get(int r, int d, double alpha) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(r, d, d > 0 ? 0.0 : alpha);
    auto& slot = tables[key];
    if (!slot) slot = std::make_unique<JackTable<Real>>(r, d > 0 ? Real(2) / Real(d) : Real(alpha));
    return *slot;
  }
};

template <class Real>
Registry<Real>& registry() {
  static Registry<Real> reg;
  return reg;
}

}  // namespace

template <class Real>
JackTable<Real>& jack_table(int r, int d) {
  return registry<Real>().get(r, d, 0.0);
}

template <class Real>
JackTable<Real>& jack_table_alpha(int r, double alpha) {
  const double d = 2.0 / alpha;
  if (std::abs(d - std::round(d)) < 1e-13 && std::round(d) >= 1)
    return registry<Real>().get(r, int(std::round(d)), 0.0);
  return registry<Real>().get(r, 0, alpha);
}

template class JackTable<double>;
template class JackTable<quad>;
template class JackTable<bf100>;
template JackTable<double>& jack_table<double>(int, int);
template JackTable<quad>& jack_table<quad>(int, int);
template JackTable<bf100>& jack_table<bf100>(int, int);
template JackTable<double>& jack_table_alpha<double>(int, double);
template JackTable<quad>& jack_table_alpha<quad>(int, double);

}  // namespace cone
