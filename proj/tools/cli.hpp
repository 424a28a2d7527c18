#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace cone::cli {

inline constexpr int kSchema = 1;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kMath = 3 };

// Runs the command line `args` (without the program name); results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Check {
  std::string suite;
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  nlohmann::json detail;
};

struct VerifyOptions {
  bool quick = false;
  std::string algebra;  // empty: the suite's default set
  int threads = 0;
  std::uint64_t seed = 1;
};

std::vector<Check> verify_core(const VerifyOptions& o);
std::vector<Check> verify_spherical(const VerifyOptions& o);
std::vector<Check> verify_bessel(const VerifyOptions& o, nlohmann::json* table);
std::vector<Check> verify_semigroup(const VerifyOptions& o);

nlohmann::json to_json(const Check& c);

}  // namespace cone::cli
