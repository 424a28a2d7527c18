#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cone/jordan.hpp"
#include "cone/spherical.hpp"

namespace cone {

enum class Kind { I, J };

struct BesselParams {
  Algebra alg;
  cd lambda = 1.0;
  int k = 0;
  Kind kind = Kind::I;
  // When false, the integral raises k to the smallest value with Re(lambda) + k >= 2n/r.
  bool pin_k = false;
};

enum class Precision { Auto, Double, Quad, Digits100 };
const char* precision_name(Precision p);

enum class ErrorKind { TailBound, StandardError };

struct EvalResult {
  cd value = 0.0;
  double error = 0.0;
  ErrorKind error_kind = ErrorKind::TailBound;
  // series
  int max_weight_used = 0;
  double tail_bound = 0.0;
  double roundoff = 0.0;
  Precision precision = Precision::Double;
  bool converged = true;
  // Monte Carlo
  long long samples = 0;
  long long accepted = 0;
  int k_used = 0;
};

struct SeriesOptions {
  int max_weight = kDefaultMaxWeight;
  double rel_tol = 1e-14;
  Precision precision = Precision::Auto;
};

// z lies on the closure of the rank-l orbit: t_{l+1}, ..., t_r negligible.
bool on_variety(const ComplexElement& z, int l);

// I_lambda(z) or J_lambda(z) = I_lambda(-z) as a restricted spherical series.
EvalResult bessel_series(const BesselParams& p, const ComplexElement& z, const SeriesOptions& opt = {});

// Classical closed forms for V = R and real arguments.
cd bessel_I_real_line(double lambda, double y);
cd bessel_J_real_line(double lambda, double y);

cd one_F1(int k, cd lambda, const ComplexElement& x, const ComplexElement& w);

struct DkCoefficients {
  cd general;
  std::optional<cd> reduced;  // (lambda)_k 1F1(-k, lambda; -x, y) when (lambda)_m never vanishes
};
DkCoefficients dk_exp_coeffs(int k, cd lambda, const ComplexElement& x, const ComplexElement& y);

enum class Sampler { SobolBox, UniformBall };
const char* sampler_name(Sampler s);
Sampler parse_sampler(const std::string& s);

struct MCSpec {
  Sampler sampler = Sampler::SobolBox;
  long long samples = 1 << 20;
  std::uint64_t seed = 1;
  int chunk = 4096;
  int threads = 0;  // 0: CONE_BESSEL_THREADS or hardware concurrency
};

inline constexpr int kReplicates = 16;

int worker_count(int requested);

// Enclosing region used by the sampler and its volume.
double enclosing_volume(const Algebra& a, Sampler s);

struct DomainEstimate {
  double volume = 0.0;
  double volume_error = 0.0;
  long long samples = 0;
  long long accepted = 0;
};

// Streams accepted points in sequence order; each carries weight volume/N, so sum f*weight estimates
// the integral of f over D.
DomainEstimate sample_D(const Algebra& a, const MCSpec& mc,
                        const std::function<void(const ComplexElement& w, double weight)>& sink = {});

struct MCEstimate {
  cd value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  long long accepted = 0;
};

// Integral over D of f(w, h(w,w)); f receives coordinates of accepted points.
MCEstimate integrate_D(const Algebra& a, const MCSpec& mc,
                       const std::function<cd(const Eigen::VectorXcd& w, double h)>& f);

int effective_k(const BesselParams& p);

// I_lambda(x^2) (or J_lambda(x^2)) through the bounded domain integral.
EvalResult bessel_integral(const BesselParams& p, const ComplexElement& x, const MCSpec& mc);

// Gamma(lambda)/(2 pi i) times the contour integral of e^{w + x/w} w^{-lambda} (V = R).
cd tube_contour_oracle(double lambda, double x);
// Same on a general algebra; only V = R is supported.
cd tube_contour_oracle(const Algebra& a, double lambda, double x);

struct BoundRow {
  double norm1 = 0.0;  // |x|_1
  double ratio = 0.0;
  int family = 0;      // 0 real, 1 imaginary, 2 mixed
};

struct BoundReport {
  double c_star = 0.0;
  double validation_max = 0.0;
  int calibration_count = 0;
  int validation_count = 0;
  int violations = 0;
  double argmax_norm1 = 0.0;
  double max_error = 0.0;  // largest certified error of a ratio
  std::vector<BoundRow> calibration;
  std::vector<BoundRow> validation;
};

// Ratio |B(x^2)| / ((1 + |x|_1^{rk}) e^{2|Re x|_1}) (Im for J).
double bound_ratio(const BesselParams& p, const ComplexElement& x, double* err = nullptr);

BoundReport upper_bound_check(const BesselParams& p, int sample_count, std::mt19937_64& rng,
                              double max_norm1 = 20.0);

// Random x on the rank-l orbit closure with |x|_1 = target; family 0 real, 1 imaginary, 2 mixed.
ComplexElement random_on_variety(const Algebra& a, int l, int family, double norm1, std::mt19937_64& rng);

}  // namespace cone
