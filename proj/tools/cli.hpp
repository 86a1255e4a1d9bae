#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfwf::cli {

inline constexpr const char* kSchema = "tfwf.report/1";

/// Resolved parameters of one run: defaults, then --config, then flags.
struct RunConfig {
  std::string command;
  double gamma = 1.0;
  std::vector<double> r{1.0, 2.0, 4.0, 8.0};
  std::vector<double> snr{100.0};
  std::vector<double> sdr{10.0};
  double theta2 = 0.01;
  double sigma2 = 1.0;
  /// 0 picks the grid size from the symbol's decay.
  long grid_n = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  /// szego: scale b and function names.
  std::vector<double> b{2.0};
  std::vector<std::string> g{"half_log_plus", "min_one"};
  /// simulate: pulses per codeword, trials, R_k / C_k, pulse-train dump path.
  std::vector<int> L{4};
  std::uint64_t trials = 1000;
  double rate_fraction = 0.7;
  std::string pulse_csv;
  /// wvs: Monte Carlo draws for the empirical spectrum (0 = skip).
  std::uint64_t draws = 0;
};

/// Overlays keys of a JSON object onto cfg; throws std::invalid_argument on unknown keys or bad types.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& cfg);

/// Full command-line entry point. Results go to `out` (or --out), errors to
/// `err` as a JSON object. Returns 0 on success.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tfwf::cli
