#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "cone/bessel.hpp"
#include "cone/io.hpp"
#include "cone/jordan.hpp"
#include "cone/semigroup.hpp"
#include "cone/spherical.hpp"

namespace cone::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Algebra parse_algebra(const std::string& id) {
  try {
    return Algebra::parse(id);
  } catch (const MathError& e) {
    throw UsageError(e.what());
  }
}

json complex_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

ComplexElement parse_element(const Algebra& a, const std::string& text) {
  return element_from_json(a, json::parse(text));
}

Element parse_real_element(const Algebra& a, const std::string& text, const char* what) {
  const ComplexElement z = parse_element(a, text);
  if (!z.is_real()) throw UsageError(std::string(what) + " must be a real element");
  return z.re();
}

Kind parse_kind(const std::string& s) { return s == "J" ? Kind::J : Kind::I; }

Precision parse_precision(const std::string& s) {
  if (s == "double") return Precision::Double;
  if (s == "quad") return Precision::Quad;
  if (s == "digits100") return Precision::Digits100;
  return Precision::Auto;
}

Sampler sampler_of(const std::string& s) { return s == "ball" ? Sampler::UniformBall : Sampler::SobolBox; }

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open " + path);
  f << std::setprecision(17);
  return f;
}

// Options of one app, resolved to the values used: given ones, else their defaults.
json collect_options(const CLI::App* app) {
  json o = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help" || opt->get_lnames()[0] == "config") continue;
    const std::string name = opt->get_lnames()[0];
    if (opt->get_type_size_max() == 0) {
      o[name] = opt->count() > 0;
      continue;
    }
    std::vector<std::string> vals;
    if (opt->count() > 0) vals = opt->results();
    else if (!opt->get_default_str().empty()) vals = {opt->get_default_str()};
    else continue;
    if (vals.size() == 1) o[name] = vals[0];
    else o[name] = vals;
  }
  return o;
}

// Global options given next to --config take precedence over the echoed ones.
std::vector<std::string> args_from_config(const json& cfg, const std::vector<std::string>& globals) {
  const json& c = cfg.contains("config") ? cfg.at("config") : cfg;
  if (c.value("schema", 0) != kSchema) throw UsageError("config needs \"schema\": 1");
  std::vector<std::string> args = globals;
  auto emit = [&](const json& opts, bool skip_given) {
    for (const auto& [name, v] : opts.items()) {
      if (skip_given && std::find(globals.begin(), globals.end(), "--" + name) != globals.end()) continue;
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back("--" + name);
      } else if (v.is_array()) {
        args.push_back("--" + name);
        for (const json& s : v) args.push_back(s.get<std::string>());
      } else {
        args.push_back("--" + name);
        args.push_back(v.get<std::string>());
      }
    }
  };
  emit(c.value("global", json::object()), true);
  for (const json& w : c.at("command")) args.push_back(w.get<std::string>());
  emit(c.value("options", json::object()), false);
  return args;
}

struct BesselEval {
  std::string algebra = "r", kind = "I", x = "0", method = "series", sampler = "sobol", precision = "auto";
  double lambda = 1.0, lambda_im = 0.0, rel_tol = 1e-14;
  int k = 0, max_weight = kDefaultMaxWeight, chunk = 4096;
  long long samples = 0;
  std::uint64_t seed = 1;
  CLI::Option* k_opt = nullptr;
};

void add_bessel_eval(CLI::App* c, BesselEval& b) {
  c->add_option("--algebra", b.algebra, "r, symr<r>, hermc<r> or spin<n>");
  c->add_option("--lambda", b.lambda, "real part of lambda");
  c->add_option("--lambda-im", b.lambda_im, "imaginary part of lambda");
  b.k_opt = c->add_option("--k", b.k, "order of the 1F1 factor; given explicitly it is pinned")->check(CLI::NonNegativeNumber);
  // Left out of the echoed config unless given, so a rerun keeps the automatic choice.
  b.k_opt->default_str("");
  c->add_option("--kind", b.kind)->check(CLI::IsMember({"I", "J"}));
  c->add_option("--x", b.x, "x as JSON (number, eigenvalue list or element); the value is taken at x^2");
  c->add_option("--method", b.method)->check(CLI::IsMember({"series", "integral", "both"}));
  c->add_option("--samples", b.samples, "0: 10^6 for V = R, 10^7 otherwise")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", b.seed);
  c->add_option("--sampler", b.sampler)->check(CLI::IsMember({"sobol", "ball"}));
  c->add_option("--chunk", b.chunk)->check(CLI::PositiveNumber);
  c->add_option("--max-weight", b.max_weight)->check(CLI::PositiveNumber);
  c->add_option("--precision", b.precision)->check(CLI::IsMember({"auto", "double", "quad", "digits100"}));
  c->add_option("--rel-tol", b.rel_tol)->check(CLI::NonNegativeNumber);
}

json series_json(const EvalResult& r) {
  return {{"value", complex_json(r.value)},
          {"error", r.error},
          {"meta",
           {{"max_weight_used", r.max_weight_used},
            {"tail_bound", r.tail_bound},
            {"roundoff", r.roundoff},
            {"precision", precision_name(r.precision)},
            {"converged", r.converged}}}};
}

json integral_json(const EvalResult& r, const MCSpec& mc) {
  return {{"value", complex_json(r.value)},
          {"error", r.error},
          {"meta",
           {{"samples", r.samples},
            {"accepted", r.accepted},
            {"k_used", r.k_used},
            {"sampler", sampler_name(mc.sampler)},
            {"seed", mc.seed},
            {"chunk", mc.chunk}}}};
}

json run_bessel_eval(const BesselEval& b, int threads) {
  const Algebra a = parse_algebra(b.algebra);
  BesselParams p{a, cd(b.lambda, b.lambda_im), b.k, parse_kind(b.kind), b.k_opt->count() > 0};
  if (p.pin_k && !(b.lambda + b.k > 2.0 * a.n / a.r - 1))
    throw MathError(ErrorCode::ParameterOutOfRange, "Re lambda + k must exceed 2n/r - 1");
  const ComplexElement x = parse_element(a, b.x);
  json out = {{"x", element_to_json(x)}, {"kind", b.kind}};
  if (b.method != "integral") {
    SeriesOptions so;
    so.max_weight = b.max_weight;
    so.rel_tol = b.rel_tol;
    so.precision = parse_precision(b.precision);
    out["series"] = series_json(bessel_series(p, jordan_product(x, x), so));
  }
  if (b.method != "series") {
    MCSpec mc;
    mc.samples = b.samples > 0 ? b.samples : (a.r == 1 ? 1000000 : 10000000);
    mc.seed = b.seed;
    mc.sampler = sampler_of(b.sampler);
    mc.chunk = b.chunk;
    mc.threads = threads;
    out["integral"] = integral_json(bessel_integral(p, x, mc), mc);
  }
  const json& primary = out.contains("series") ? out["series"] : out["integral"];
  out["value"] = primary["value"];
  out["error"] = primary["error"];
  if (out.contains("series") && out.contains("integral")) {
    const cd s(out["series"]["value"]["re"].get<double>(), out["series"]["value"]["im"].get<double>());
    const cd i(out["integral"]["value"]["re"].get<double>(), out["integral"]["value"]["im"].get<double>());
    out["delta"] = std::abs(s - i);
  }
  return out;
}

struct KernelEval {
  std::string algebra = "r", x = "1", y = "1";
  double lambda = 2.0, t_re = 1.0, t_im = 0.0;
  int max_weight = kDefaultMaxWeight;
};

void add_kernel_eval(CLI::App* c, KernelEval& k) {
  c->add_option("--algebra", k.algebra);
  c->add_option("--lambda", k.lambda);
  c->add_option("--t-re", k.t_re);
  c->add_option("--t-im", k.t_im);
  c->add_option("--x", k.x, "x in the cone as JSON");
  c->add_option("--y", k.y, "y in the cone as JSON");
  c->add_option("--max-weight", k.max_weight)->check(CLI::PositiveNumber);
}

json run_kernel_eval(const KernelEval& k) {
  const Algebra a = parse_algebra(k.algebra);
  const KernelParams p{a, k.lambda, cd(k.t_re, k.t_im)};
  const Element x = parse_real_element(a, k.x, "x"), y = parse_real_element(a, k.y, "y");
  SeriesOptions so;
  so.max_weight = k.max_weight;
  const EvalResult r = kernel_K(p, x, y, so);
  return {{"value", complex_json(r.value)},
          {"error", r.error},
          {"meta", {{"max_weight_used", r.max_weight_used}, {"decay_exponent", decay_exponent(p.t)}}}};
}

struct BoundCheck {
  std::string algebra = "r", kind = "I", csv;
  double lambda = 3.0, lambda_im = 0.0, max_norm = 20.0;
  int k = 0, samples = 400;
  std::uint64_t seed = 1;
};

json run_bessel_bound(const BoundCheck& b) {
  const Algebra a = parse_algebra(b.algebra);
  std::mt19937_64 rng(b.seed);
  const BoundReport rep =
      upper_bound_check(BesselParams{a, cd(b.lambda, b.lambda_im), b.k, parse_kind(b.kind), true}, b.samples, rng,
                        b.max_norm);
  if (!b.csv.empty()) {
    std::ofstream f = open_out(b.csv);
    f << "split,norm1,family,ratio,c_star\n";
    for (const auto& r : rep.calibration) f << "calibration," << r.norm1 << ',' << r.family << ',' << r.ratio << ',' << rep.c_star << '\n';
    for (const auto& r : rep.validation) f << "validation," << r.norm1 << ',' << r.family << ',' << r.ratio << ',' << rep.c_star << '\n';
  }
  return {{"c_star", rep.c_star},
          {"validation_max", rep.validation_max},
          {"calibration_count", rep.calibration_count},
          {"validation_count", rep.validation_count},
          {"violations", rep.violations},
          {"argmax_norm1", rep.argmax_norm1},
          {"max_error", rep.max_error}};
}

struct ComposeCheck {
  std::string algebra = "r", profile = "exp", csv;
  double lambda = 3.0, s_re = 0.5, s_im = 0.0, t_re = 0.5, t_im = 0.0, grid_max = 4.0, rel_tol = 1e-9;
  int grid_points = 5;
};

json run_compose(const ComposeCheck& c) {
  const Algebra a = parse_algebra(c.algebra);
  if (c.grid_points < 1 || !(c.grid_max >= 0)) throw UsageError("grid needs at least one point and grid-max >= 0");
  RadialFunction phi = c.profile == "gauss"
                           ? RadialFunction{[](const Eigen::VectorXd& v) { return cd(std::exp(-v.squaredNorm())); },
                                            Growth::exponential(-1)}
                           : RadialFunction{[](const Eigen::VectorXd& v) { return cd(std::exp(-v.sum())); },
                                            Growth::exponential(-1)};
  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < c.grid_points; ++i) {
    const double s = c.grid_points == 1 ? c.grid_max : c.grid_max * i / (c.grid_points - 1);
    Eigen::VectorXd v(a.r);
    for (int j = 0; j < a.r; ++j) v(j) = s * std::pow(0.5, j);
    grid.push_back(v);
  }
  TauOptions opt;
  opt.rel_tol = c.rel_tol;
  const SemigroupReport rep = semigroup_check(a, c.lambda, cd(c.s_re, c.s_im), cd(c.t_re, c.t_im), phi, grid, opt);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
                    {"composed", complex_json(r.composed)},
                    {"direct", complex_json(r.direct)}});
  }
  if (!c.csv.empty()) {
    std::ofstream f = open_out(c.csv);
    f << "tr_x,composed_re,composed_im,direct_re,direct_im\n";
    for (const auto& r : rep.rows)
      f << r.x.sum() << ',' << r.composed.real() << ',' << r.composed.imag() << ',' << r.direct.real() << ','
        << r.direct.imag() << '\n';
  }
  return {{"discrepancy", rep.discrepancy}, {"quadrature_error", rep.quadrature_error},
          {"sup_direct", rep.sup_direct},   {"level", rep.level},
          {"nodes", rep.nodes},             {"rows", rows}};
}

struct KernelBound {
  std::string algebra = "r", csv;
  double lambda = 2.0, t_re = 0.5, t_im = 0.0, max_trace = 50.0;
  int k = 0, samples = 300;
  std::uint64_t seed = 1;
};

json run_kernel_bound(const KernelBound& b) {
  const Algebra a = parse_algebra(b.algebra);
  std::mt19937_64 rng(b.seed);
  const KernelBoundReport rep = kernel_bound_check(KernelParams{a, b.lambda, cd(b.t_re, b.t_im)}, b.k, b.samples, rng, b.max_trace);
  if (!b.csv.empty()) {
    std::ofstream f = open_out(b.csv);
    f << "split,tr_x,tr_y,abs_k,bound\n";
    auto dump = [&](const char* split, const std::vector<KernelBoundRow>& rows) {
      for (const auto& r : rows)
        f << split << ',' << r.tr_x << ',' << r.tr_y << ',' << r.abs_k << ',' << rep.c_star * r.envelope << '\n';
    };
    dump("calibration", rep.calibration);
    dump("validation", rep.validation);
  }
  return {{"kappa", rep.kappa},
          {"c_star", rep.c_star},
          {"validation_max", rep.validation_max},
          {"calibration_count", rep.calibration_count},
          {"validation_count", rep.validation_count},
          {"violations", rep.violations}};
}

struct Tabulate {
  std::string algebra = "r", kind = "I", out;
  std::vector<double> lambdas = {1.0, 2.0, 3.0};
  double x_min = 0.0, x_max = 4.0, lambda = 0.0, lambda_im = 0.0, t_re = 1.0, t_im = 0.0, s_max = 10.0;
  double s_re = 2.5, s_im = 0.0, s_min = 1.5, s_top = 4.0, max_norm = 20.0;
  int points = 41, k = 0, samples = 400, max_weight = 6;
  std::uint64_t seed = 1;
};

void check_grid(int points, double lo, double hi) {
  if (points < 1) throw UsageError("grid needs at least one point");
  if (!(hi >= lo)) throw UsageError("grid maximum is below its minimum");
  if (points == 1 && hi != lo) throw UsageError("a one-point grid needs equal bounds");
}

double grid_at(int i, int points, double lo, double hi) { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }

// Writes CSV rows to `os`; returns the number of rows.
int run_tabulate(const std::string& what, const Tabulate& t, std::ostream& os) {
  os << std::setprecision(17);
  const Algebra a = parse_algebra(t.algebra);
  int rows = 0;
  if (what == "bessel") {
    check_grid(t.points, t.x_min, t.x_max);
    if (t.lambdas.empty()) throw UsageError("no lambda values");
    os << "lambda,x,re,im,error\n";
    const ComplexElement e(Element::unit(a));
    for (double lam : t.lambdas)
      for (int i = 0; i < t.points; ++i) {
        const double x = grid_at(i, t.points, t.x_min, t.x_max);
        const EvalResult r = bessel_series(BesselParams{a, lam, 0, parse_kind(t.kind)}, cd(x) * e);
        os << lam << ',' << x << ',' << r.value.real() << ',' << r.value.imag() << ',' << r.error << '\n';
        ++rows;
      }
  } else if (what == "kernel-decay") {
    check_grid(t.points, 0.0, t.s_max);
    const double lam = t.lambda > 0 ? t.lambda : a.n_over_r() + 0.5;
    const KernelParams p{a, lam, cd(t.t_re, t.t_im)};
    const Element e = Element::unit(a);
    os << "s,re,im,abs,error\n";
    for (int i = 0; i < t.points; ++i) {
      const double s = grid_at(i, t.points, 0.0, t.s_max);
      const EvalResult r = kernel_K(p, s * e, s * e);
      os << s << ',' << r.value.real() << ',' << r.value.imag() << ',' << std::abs(r.value) << ',' << r.error << '\n';
      ++rows;
    }
  } else if (what == "bound-ratio") {
    if (t.samples < 1) throw UsageError("samples must be positive");
    std::mt19937_64 rng(t.seed);
    const double lam = t.lambda > 0 ? t.lambda : 3.0;
    const BoundReport rep =
        upper_bound_check(BesselParams{a, cd(lam, t.lambda_im), t.k, parse_kind(t.kind), true}, t.samples, rng, t.max_norm);
    os << "split,norm1,family,ratio,c_star\n";
    for (const auto& r : rep.calibration) os << "calibration," << r.norm1 << ',' << r.family << ',' << r.ratio << ',' << rep.c_star << '\n';
    for (const auto& r : rep.validation) os << "validation," << r.norm1 << ',' << r.family << ',' << r.ratio << ',' << rep.c_star << '\n';
    rows = int(rep.calibration.size() + rep.validation.size());
  } else if (what == "poch") {
    if (t.max_weight < 0) throw UsageError("max-weight must be nonnegative");
    os << "partition,s_re,s_im,re,im\n";
    for (const Partition& m : partitions_upto(a.r, t.max_weight)) {
      const cd v = poch_general(cd(t.s_re, t.s_im), m, a.d);
      std::string label;
      for (size_t j = 0; j < m.size(); ++j) label += (j ? " " : "") + std::to_string(m[j]);
      os << label << ',' << t.s_re << ',' << t.s_im << ',' << v.real() << ',' << v.imag() << '\n';
      ++rows;
    }
  } else if (what == "gamma") {
    check_grid(t.points, t.s_min, t.s_top);
    os << "s_re,s_im,re,im\n";
    for (int i = 0; i < t.points; ++i) {
      const double s = grid_at(i, t.points, t.s_min, t.s_top);
      const cd v = std::exp(gindikin_gamma_log(cd(s, t.s_im), a));
      os << s << ',' << t.s_im << ',' << v.real() << ',' << v.imag() << '\n';
      ++rows;
    }
  }
  return rows;
}

struct SampleDomain {
  std::string algebra = "r", sampler = "sobol", out;
  long long samples = 1 << 16;
  std::uint64_t seed = 1;
  int chunk = 4096;
};

json run_sample_domain(const SampleDomain& s, int threads) {
  const Algebra a = parse_algebra(s.algebra);
  MCSpec mc;
  mc.samples = s.samples;
  mc.seed = s.seed;
  mc.sampler = sampler_of(s.sampler);
  mc.chunk = s.chunk;
  mc.threads = threads;
  std::ofstream f;
  if (!s.out.empty()) {
    f = open_out(s.out);
    for (int k = 0; k < a.n; ++k) f << "re" << k << ',';
    for (int k = 0; k < a.n; ++k) f << "im" << k << ',';
    f << "weight\n";
  }
  const DomainEstimate d = sample_D(a, mc, [&](const ComplexElement& w, double weight) {
    if (!f.is_open()) return;
    for (int k = 0; k < a.n; ++k) f << w.c(k).real() << ',';
    for (int k = 0; k < a.n; ++k) f << w.c(k).imag() << ',';
    f << weight << '\n';
  });
  return {{"volume", d.volume},
          {"volume_error", d.volume_error},
          {"reference_volume", 1.0 / c_lambda(2.0 * a.n / a.r, a).real()},
          {"enclosing_volume", enclosing_volume(a, mc.sampler)},
          {"samples", d.samples},
          {"accepted", d.accepted},
          {"acceptance", d.samples ? double(d.accepted) / d.samples : 0.0}};
}

json run_verify(const std::string& suite, const VerifyOptions& vo, bool& ok) {
  std::vector<Check> checks;
  json table;
  auto append = [&](std::vector<Check> c) { checks.insert(checks.end(), c.begin(), c.end()); };
  if (suite == "core" || suite == "all") append(verify_core(vo));
  if (suite == "spherical" || suite == "all") append(verify_spherical(vo));
  if (suite == "bessel" || suite == "all") append(verify_bessel(vo, &table));
  if (suite == "semigroup" || suite == "all") append(verify_semigroup(vo));
  json list = json::array();
  int failed = 0;
  for (const Check& c : checks) {
    list.push_back(to_json(c));
    if (!c.pass) ++failed;
  }
  ok = failed == 0;
  json out = {{"suite", suite}, {"quick", vo.quick}, {"checks", list},
              {"passed", int(checks.size()) - failed}, {"failed", failed}};
  if (!table.is_null()) out["table"] = table;
  return out;
}

}  // namespace

int run(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = input;
  try {
    const auto it = std::find_if(args.begin(), args.end(),
                                 [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (it != args.end()) {
      std::string path = *it == "--config" ? (it + 1 != args.end() ? *(it + 1) : "") : it->substr(9);
      std::ifstream f(path);
      if (!f) throw UsageError("cannot read config " + path);
      const std::vector<std::string> globals(args.begin(), it);
      if (args.end() - it > (*it == "--config" ? 2 : 1)) throw UsageError("--config takes no further arguments");
      args = args_from_config(json::parse(f), globals);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"Bessel functions and the holomorphic semigroup on symmetric cones"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads; 0: CONE_BESSEL_THREADS or all cores")->check(CLI::NonNegativeNumber);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a Bessel function or the semigroup kernel")->require_subcommand(1);
  BesselEval eb;
  CLI::App* eval_b = eval->add_subcommand("bessel", "I or J at x^2 by series and/or domain integral");
  add_bessel_eval(eval_b, eb);
  KernelEval ek;
  CLI::App* eval_k = eval->add_subcommand("kernel", "semigroup kernel K(x, y; t)");
  add_kernel_eval(eval_k, ek);

  CLI::App* bessel = app.add_subcommand("bessel", "Bessel functions")->require_subcommand(1);
  BesselEval bb;
  CLI::App* bessel_e = bessel->add_subcommand("eval", "same as eval bessel");
  add_bessel_eval(bessel_e, bb);
  BoundCheck bc;
  CLI::App* bessel_c = bessel->add_subcommand("check-bound", "calibrate and validate the growth bound");
  bessel_c->add_option("--algebra", bc.algebra);
  bessel_c->add_option("--lambda", bc.lambda);
  bessel_c->add_option("--lambda-im", bc.lambda_im);
  bessel_c->add_option("--k", bc.k)->check(CLI::NonNegativeNumber);
  bessel_c->add_option("--kind", bc.kind)->check(CLI::IsMember({"I", "J"}));
  bessel_c->add_option("--samples", bc.samples, "size of each split")->check(CLI::PositiveNumber);
  bessel_c->add_option("--seed", bc.seed);
  bessel_c->add_option("--max-norm", bc.max_norm)->check(CLI::PositiveNumber);
  bessel_c->add_option("--csv", bc.csv, "write (split, |x|_1, family, ratio, C*) rows");

  CLI::App* semi = app.add_subcommand("semigroup", "holomorphic semigroup")->require_subcommand(1);
  KernelEval sk;
  CLI::App* semi_k = semi->add_subcommand("kernel", "same as eval kernel");
  add_kernel_eval(semi_k, sk);
  ComposeCheck cc;
  CLI::App* semi_c = semi->add_subcommand("compose-check", "tau(s) tau(t) phi against tau(s + t) phi");
  semi_c->add_option("--algebra", cc.algebra);
  semi_c->add_option("--lambda", cc.lambda);
  semi_c->add_option("--s-re", cc.s_re);
  semi_c->add_option("--s-im", cc.s_im);
  semi_c->add_option("--t-re", cc.t_re);
  semi_c->add_option("--t-im", cc.t_im);
  semi_c->add_option("--profile", cc.profile, "exp: e^{-tr y}, gauss: e^{-|y|^2}")->check(CLI::IsMember({"exp", "gauss"}));
  semi_c->add_option("--grid-max", cc.grid_max);
  semi_c->add_option("--grid-points", cc.grid_points);
  semi_c->add_option("--rel-tol", cc.rel_tol)->check(CLI::PositiveNumber);
  semi_c->add_option("--csv", cc.csv);
  KernelBound kb;
  CLI::App* semi_b = semi->add_subcommand("bound-check", "calibrate and validate the kernel decay bound");
  semi_b->add_option("--algebra", kb.algebra);
  semi_b->add_option("--lambda", kb.lambda);
  semi_b->add_option("--t-re", kb.t_re);
  semi_b->add_option("--t-im", kb.t_im);
  semi_b->add_option("--k", kb.k)->check(CLI::NonNegativeNumber);
  semi_b->add_option("--samples", kb.samples)->check(CLI::PositiveNumber);
  semi_b->add_option("--seed", kb.seed);
  semi_b->add_option("--max-trace", kb.max_trace)->check(CLI::PositiveNumber);
  semi_b->add_option("--csv", kb.csv, "write (split, tr x, tr y, |K|, bound) rows");

  CLI::App* verify = app.add_subcommand("verify", "run an invariant suite")->require_subcommand(1);
  VerifyOptions vo;
  std::vector<std::pair<std::string, CLI::App*>> suites;
  for (const char* s : {"core", "spherical", "bessel", "semigroup", "all"}) {
    CLI::App* v = verify->add_subcommand(s);
    v->add_flag("--quick", vo.quick, "reduced sample counts");
    v->add_option("--algebra", vo.algebra, "restrict to one algebra");
    v->add_option("--seed", vo.seed);
    suites.emplace_back(s, v);
  }

  CLI::App* tab = app.add_subcommand("tabulate", "CSV tables")->require_subcommand(1);
  Tabulate tb;
  std::vector<std::pair<std::string, CLI::App*>> tables;
  for (const char* w : {"bessel", "kernel-decay", "bound-ratio", "poch", "gamma"}) {
    CLI::App* t = tab->add_subcommand(w);
    t->add_option("--algebra", tb.algebra);
    t->add_option("--out", tb.out, "CSV path; stdout when empty");
    tables.emplace_back(w, t);
  }
  CLI::App* tb_b = tables[0].second;
  tb_b->add_option("--lambdas", tb.lambdas)->delimiter(',');
  tb_b->add_option("--kind", tb.kind)->check(CLI::IsMember({"I", "J"}));
  tb_b->add_option("--x-min", tb.x_min);
  tb_b->add_option("--x-max", tb.x_max);
  tb_b->add_option("--points", tb.points);
  CLI::App* tb_k = tables[1].second;
  tb_k->add_option("--lambda", tb.lambda, "0: n/r + 1/2");
  tb_k->add_option("--t-re", tb.t_re);
  tb_k->add_option("--t-im", tb.t_im);
  tb_k->add_option("--s-max", tb.s_max);
  tb_k->add_option("--points", tb.points);
  CLI::App* tb_r = tables[2].second;
  tb_r->add_option("--lambda", tb.lambda, "0: 3");
  tb_r->add_option("--lambda-im", tb.lambda_im);
  tb_r->add_option("--k", tb.k)->check(CLI::NonNegativeNumber);
  tb_r->add_option("--kind", tb.kind)->check(CLI::IsMember({"I", "J"}));
  tb_r->add_option("--samples", tb.samples);
  tb_r->add_option("--seed", tb.seed);
  tb_r->add_option("--max-norm", tb.max_norm)->check(CLI::PositiveNumber);
  CLI::App* tb_p = tables[3].second;
  tb_p->add_option("--s-re", tb.s_re);
  tb_p->add_option("--s-im", tb.s_im);
  tb_p->add_option("--max-weight", tb.max_weight);
  CLI::App* tb_g = tables[4].second;
  tb_g->add_option("--s-min", tb.s_min);
  tb_g->add_option("--s-max", tb.s_top);
  tb_g->add_option("--s-im", tb.s_im);
  tb_g->add_option("--points", tb.points);

  SampleDomain sd;
  CLI::App* samp = app.add_subcommand("sample-domain", "sample the bounded domain D and estimate its volume");
  samp->add_option("--algebra", sd.algebra);
  samp->add_option("--samples", sd.samples)->check(CLI::PositiveNumber);
  samp->add_option("--seed", sd.seed);
  samp->add_option("--sampler", sd.sampler)->check(CLI::IsMember({"sobol", "ball"}));
  samp->add_option("--chunk", sd.chunk)->check(CLI::PositiveNumber);
  samp->add_option("--out", sd.out, "write accepted points and weights as CSV");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  // Command words from the root to the selected leaf.
  std::vector<std::string> command;
  const CLI::App* leaf = &app;
  while (true) {
    const auto subs = leaf->get_subcommands();
    if (subs.empty()) break;
    leaf = subs.front();
    command.push_back(leaf->get_name());
  }
  std::string joined;
  for (const auto& w : command) joined += (joined.empty() ? "" : " ") + w;
  const json config = {{"schema", kSchema}, {"command", command}, {"global", collect_options(&app)},
                       {"options", collect_options(leaf)}};

  auto emit = [&](json body) {
    json doc = {{"schema", kSchema}, {"command", joined}, {"config", config}};
    doc.update(body);
    out << doc.dump(2) << '\n';
  };

  try {
    if (eval_b->parsed()) emit(run_bessel_eval(eb, threads));
    else if (bessel_e->parsed()) emit(run_bessel_eval(bb, threads));
    else if (eval_k->parsed()) emit(run_kernel_eval(ek));
    else if (semi_k->parsed()) emit(run_kernel_eval(sk));
    else if (bessel_c->parsed()) emit(run_bessel_bound(bc));
    else if (semi_c->parsed()) emit(run_compose(cc));
    else if (semi_b->parsed()) emit(run_kernel_bound(kb));
    else if (samp->parsed()) emit(run_sample_domain(sd, threads));
    else if (verify->parsed()) {
      vo.threads = threads;
      if (!vo.algebra.empty()) parse_algebra(vo.algebra);
      for (const auto& [name, sub] : suites) {
        if (!sub->parsed()) continue;
        bool ok = false;
        emit(run_verify(name, vo, ok));
        return ok ? kOk : kVerifyFailed;
      }
    } else if (tab->parsed()) {
      for (const auto& [name, sub] : tables) {
        if (!sub->parsed()) continue;
        if (tb.out.empty()) {
          run_tabulate(name, tb, out);
        } else {
          std::ofstream f = open_out(tb.out);
          const int rows = run_tabulate(name, tb, f);
          emit({{"out", tb.out}, {"rows", rows}});
        }
      }
    }
  } catch (const MathError& e) {
    err << "error: " << e.what() << '\n';
    return kMath;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: malformed JSON argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace cone::cli
