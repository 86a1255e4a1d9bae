#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "tfwf/coding_sim.hpp"
#include "tfwf/errors.hpp"
#include "tfwf/heat_channel.hpp"
#include "tfwf/io.hpp"
#include "tfwf/random.hpp"
#include "tfwf/source_model.hpp"
#include "tfwf/waterfilling.hpp"
#include "tfwf/weyl.hpp"

namespace tfwf::cli {

using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
std::vector<T> get_list(const json& v, const std::string& key) {
  if (v.is_array()) return get_as<std::vector<T>>(v, key);
  return {get_as<T>(v, key)};
}

void apply_command_defaults(RunConfig& cfg) {
  if (cfg.command == "simulate") {
    cfg.gamma = 0.1;
    cfg.r = {2.0};
    cfg.snr = {100.0};
  } else if (cfg.command == "eoc") {
    cfg.gamma = 0.1;
    cfg.r = {2.0};
  } else if (cfg.command == "wvs") {
    cfg.r = {2.0};
  }
  const bool tabular = cfg.command == "capacity" || cfg.command == "rate" || cfg.command == "wvs";
  cfg.format = tabular ? "csv" : "json";
}

void check_config(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
  const bool csv_ok = cfg.command == "capacity" || cfg.command == "rate" || cfg.command == "wvs";
  if (cfg.format == "csv" && !csv_ok) throw UsageError(cfg.command + " only produces json output");
  if (cfg.r.empty()) throw UsageError("--r needs at least one value");
  if (cfg.grid_n < 0) throw UsageError("--grid-n must be non-negative");
  if (cfg.command == "simulate" || cfg.command == "wvs") {
    if (cfg.r.size() != 1) throw UsageError(cfg.command + " takes a single --r value");
  }
  if (cfg.command == "simulate" && cfg.snr.size() != 1) throw UsageError("simulate takes a single --snr value");
}

GridOptions grid_options(const RunConfig& cfg, double oversample = 1.0) {
  GridOptions opts;
  opts.oversample = oversample;
  opts.n_override = cfg.grid_n;
  return opts;
}

Eigen::VectorXd operator_spectrum(const WeylSymbol& p, double r, const Grid2D& grid) {
  const auto kernel = symbol_to_kernel(p, r, grid);
  if (is_real(kernel)) return spectrum_values(real_part(kernel));
  return spectrum_values(kernel);
}

json envelope(const RunConfig& cfg) { return {{"schema", kSchema}, {"command", cfg.command}, {"config", to_json(cfg)}}; }

struct Output {
  std::string text;
};

Output cmd_capacity(const RunConfig& cfg) {
  const auto p = heat_symbol(cfg.gamma);
  CsvTable table({"r", "snr", "C_exact_nats", "C_tf_nats", "C_closed_form_nats"});
  json rows = json::array();
  for (double r : cfg.r) {
    const auto m = heat_model(cfg.gamma, r);
    const Eigen::VectorXd noise = cfg.theta2 * eigenvalues(m, 1e-14).cwiseInverse();
    for (double snr : cfg.snr) {
      const double S = 2.0 * std::numbers::pi * r * r * cfg.theta2 * snr;
      const auto exact = waterfill_discrete(noise, S);
      const auto tf = tf_capacity(p, r, S, cfg.theta2);
      const auto closed = closed_form_capacity(snr, r);
      table.add_row({r, snr, exact.capacity_nats, tf.value_nats, closed.value_nats});
      rows.push_back({{"r", r},
                      {"snr", snr},
                      {"S", S},
                      {"C_exact_nats", exact.capacity_nats},
                      {"C_tf_nats", tf.value_nats},
                      {"C_closed_form_nats", closed.value_nats},
                      {"K", exact.K},
                      {"water_level", exact.water_level},
                      {"tf_level", tf.level},
                      {"tf_region_area", tf.region_area},
                      {"lambert_arg", closed.lambert_arg},
                      {"lambert_w0", closed.lambert_value}});
    }
  }
  if (cfg.format == "csv") return {table.str()};
  auto j = envelope(cfg);
  j["rows"] = rows;
  return {j.dump(2) + "\n"};
}

Output cmd_rate(const RunConfig& cfg) {
  const auto p = heat_symbol(cfg.gamma);
  CsvTable table({"r", "sdr", "R_exact_nats", "R_tf_nats", "R_closed_form_nats"});
  json rows = json::array();
  for (double r : cfg.r) {
    const auto m = heat_model(cfg.gamma, r);
    const Eigen::VectorXd vars = cfg.sigma2 * eigenvalues(m, 1e-14);
    const double energy = cfg.sigma2 * eigenvalue_sum(m);
    for (double sdr : cfg.sdr) {
      if (!(sdr >= 1.0)) throw DomainError("SDR must be >= 1");
      const double D = energy / sdr;
      const auto exact = reverse_waterfill_discrete(vars, D);
      const auto tf = tf_rate(p, r, D, cfg.sigma2);
      const auto closed = closed_form_rate(sdr, r);
      table.add_row({r, sdr, exact.rate_nats, tf.value_nats, closed.value_nats});
      rows.push_back({{"r", r},
                      {"sdr", sdr},
                      {"D", D},
                      {"R_exact_nats", exact.rate_nats},
                      {"R_tf_nats", tf.value_nats},
                      {"R_closed_form_nats", closed.value_nats},
                      {"K", exact.K},
                      {"water_table", exact.water_table},
                      {"tf_level", tf.level},
                      {"tf_region_area", tf.region_area},
                      {"lambert_arg", closed.lambert_arg},
                      {"lambert_wm1", closed.lambert_value}});
    }
  }
  if (cfg.format == "csv") return {table.str()};
  auto j = envelope(cfg);
  j["rows"] = rows;
  return {j.dump(2) + "\n"};
}

Output cmd_szego(const RunConfig& cfg) {
  const auto p = heat_symbol(cfg.gamma);
  std::vector<SzegoFunction> functions;
  for (const auto& name : cfg.g) functions.push_back(szego_function(name));

  json trace = json::array();
  std::vector<Eigen::VectorXd> spectra;
  for (double r : cfg.r) {
    const Grid2D grid = grid_for_symbol(p, r, grid_options(cfg));
    spectra.push_back(operator_spectrum(p, r, grid));
    const auto tc = trace_identity_check(spectra.back(), p, r);
    trace.push_back({{"r", r}, {"n_t", grid.n_t()}, {"sum", tc.sum}, {"integral", tc.integral}, {"rel_gap", tc.rel_gap}});
  }

  json results = json::array();
  for (const auto& g : functions) {
    for (double b : cfg.b) {
      json rows = json::array();
      double prev = std::numeric_limits<double>::infinity();
      bool decreasing = true;
      for (std::size_t i = 0; i < cfg.r.size(); ++i) {
        const auto gap = szego_gap(spectra[i], p, cfg.r[i], g, 1.0, b);
        rows.push_back({{"r", cfg.r[i]}, {"lhs", gap.lhs}, {"rhs", gap.rhs}, {"gap_per_r2", gap.gap_per_r2}});
        decreasing = decreasing && gap.gap_per_r2 < prev;
        prev = gap.gap_per_r2;
      }
      results.push_back({{"g", g.name}, {"b", b}, {"rows", rows}, {"decreasing", decreasing}});
    }
  }
  auto j = envelope(cfg);
  j["trace"] = trace;
  j["szego"] = results;
  return {j.dump(2) + "\n"};
}

Output cmd_eoc(const RunConfig& cfg) {
  const auto p = heat_symbol(cfg.gamma);
  json rows = json::array();
  for (double r : cfg.r) {
    const auto e = eoc(cfg.gamma, r);
    const auto mom = symbol_moments(p, r);
    rows.push_back({{"r", r},
                    {"a_exact", e.a_exact},
                    {"b_exact", e.b_exact},
                    {"a_approx", e.a_approx},
                    {"b_approx", e.b_approx},
                    {"area_exact", e.area_exact()},
                    {"moments", {{"m1", mom.m1}, {"m2", mom.m2}, {"s11", mom.s11}, {"s22", mom.s22}, {"s12", mom.s12}}},
                    {"r_lower_bound", mom.r_lower_bound},
                    {"r2_lower_bound", mom.r_lower_bound * mom.r_lower_bound}});
  }
  auto j = envelope(cfg);
  j["rows"] = rows;
  return {j.dump(2) + "\n"};
}

json report_json(const DecodingReport& rep) {
  auto vec = [](const auto& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  return {{"trials", rep.trials},
          {"L", rep.L},
          {"codebook_bits", vec(rep.codebook_bits)},
          {"codeword_errors", vec(rep.codeword_errors)},
          {"error_rates", vec(rep.error_rates)},
          {"error_rate_stderr", vec(rep.error_rate_stderr)},
          {"message_error_rate", rep.message_error_rate},
          {"input_energy_per_pulse", rep.input_energy_per_pulse},
          {"train_energy_per_pulse", rep.train_energy_per_pulse},
          {"energy_budget", rep.energy_budget},
          {"noise_mean", vec(rep.noise_mean)},
          {"noise_variance", vec(rep.noise_variance)},
          {"expected_noise_variance", vec(rep.expected_noise_variance)},
          {"max_cross_correlation", rep.max_cross_correlation},
          {"cross_correlation_bound", rep.cross_correlation_bound},
          {"rate_bits_per_pulse", rep.rate_bits_per_pulse},
          {"capacity_bits_per_pulse", rep.capacity_bits_per_pulse}};
}

Output cmd_simulate(const RunConfig& cfg) {
  const double r = cfg.r.front();
  const double snr = cfg.snr.front();
  json runs = json::array();
  json setup;
  for (std::size_t i = 0; i < cfg.L.size(); ++i) {
    const auto coding = heat_coding_config(cfg.gamma, r, snr, cfg.theta2, cfg.L[i], cfg.rate_fraction, cfg.seed);
    if (i == 0) {
      const Eigen::VectorXd caps_bits = subchannel_capacities(coding) / std::numbers::ln2;
      setup = {{"K", coding.allocation.K},
               {"water_level", coding.allocation.water_level},
               {"energy_S", coding.allocation.powers.sum()},
               {"capacity_nats", coding.allocation.capacity_nats},
               {"capacity_bits", coding.allocation.capacity_nats / std::numbers::ln2},
               {"pulse_delay", coding.basis.d},
               {"subchannel_capacity_bits", std::vector<double>(caps_bits.data(), caps_bits.data() + caps_bits.size())}};
      if (!cfg.pulse_csv.empty()) {
        const auto books = build_codebooks(coding);
        Rng pick(cfg.seed, {0x70756c7365ULL});
        Message msg(books.books.size());
        for (std::size_t k = 0; k < msg.size(); ++k) msg[k] = pick.below(static_cast<std::uint64_t>(books.books[k].rows()));
        write_file_atomic(cfg.pulse_csv, pulse_train_csv(coding, books, msg).str());
      }
    }
    runs.push_back(report_json(simulate(coding, cfg.trials)));
  }
  auto j = envelope(cfg);
  j["setup"] = setup;
  j["runs"] = runs;
  return {j.dump(2) + "\n"};
}

Output cmd_wvs(const RunConfig& cfg) {
  const double r = cfg.r.front();
  const auto p = heat_symbol(cfg.gamma);
  const Grid2D grid = grid_for_symbol(p, r, grid_options(cfg, 2.0));
  const auto kernel = symbol_to_real_kernel(p, r, grid);
  const auto pp_star = cogram(kernel);
  const auto phi = wvs(pp_star, cfg.sigma2);
  const Eigen::MatrixXd principal = principal_term(p, r, cfg.sigma2, phi);

  std::optional<SampledSymbol> empirical;
  if (cfg.draws > 0) {
    const auto src = heat_source(heat_model(cfg.gamma, r), grid, cfg.sigma2, cfg.seed);
    empirical = empirical_wvs(src, cfg.draws);
  }

  if (cfg.format == "csv") {
    if (!empirical) return {wvs_csv(phi, principal).str()};
    CsvTable table({"t", "omega", "phi", "principal", "phi_empirical"});
    for (Eigen::Index i = 0; i < phi.values.rows(); ++i)
      for (Eigen::Index k = 0; k < phi.values.cols(); ++k)
        table.add_row({phi.t(i), phi.omega(k), phi.values(i, k).real(), principal(i, k), empirical->values(i, k).real()});
    return {table.str()};
  }

  auto j = envelope(cfg);
  const double closed = cfg.sigma2 * eigenvalue_sum(heat_model(cfg.gamma, r));
  json summary = {{"r", r},
                  {"n_t", grid.n_t()},
                  {"phi_integral", phi.integral().real()},
                  {"sigma2_trace", cfg.sigma2 * pp_star.matrix.trace()},
                  {"energy_closed_form", closed},
                  {"max_principal_gap", (phi.values.real() - principal).cwiseAbs().maxCoeff()},
                  {"min_phi", phi.values.real().minCoeff()}};
  if (empirical)
    summary["empirical_rel_l2"] = (empirical->values - phi.values).norm() / phi.values.norm();
  j["summary"] = summary;
  return {j.dump(2) + "\n"};
}

void set_threads() {
  if (const char* env = std::getenv("TFWF_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw UsageError("TFWF_THREADS must be a positive integer");
    Eigen::setNbThreads(static_cast<int>(n));
  }
}

json error_json(const std::string& type, const std::string& message) {
  return {{"schema", kSchema}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "gamma") cfg.gamma = get_as<double>(v, key);
    else if (key == "r") cfg.r = get_list<double>(v, key);
    else if (key == "snr") cfg.snr = get_list<double>(v, key);
    else if (key == "sdr") cfg.sdr = get_list<double>(v, key);
    else if (key == "theta2") cfg.theta2 = get_as<double>(v, key);
    else if (key == "sigma2") cfg.sigma2 = get_as<double>(v, key);
    else if (key == "grid_n") cfg.grid_n = get_as<long>(v, key);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
    else if (key == "out") cfg.out = get_as<std::string>(v, key);
    else if (key == "format") cfg.format = get_as<std::string>(v, key);
    else if (key == "b") cfg.b = get_list<double>(v, key);
    else if (key == "g") cfg.g = get_list<std::string>(v, key);
    else if (key == "L") cfg.L = get_list<int>(v, key);
    else if (key == "trials") cfg.trials = get_as<std::uint64_t>(v, key);
    else if (key == "rate_fraction") cfg.rate_fraction = get_as<double>(v, key);
    else if (key == "pulse_csv") cfg.pulse_csv = get_as<std::string>(v, key);
    else if (key == "draws") cfg.draws = get_as<std::uint64_t>(v, key);
    else throw UsageError("unknown config key '" + key + "'");
  }
}

json to_json(const RunConfig& cfg) {
  return {{"gamma", cfg.gamma}, {"r", cfg.r},         {"snr", cfg.snr},       {"sdr", cfg.sdr},
          {"theta2", cfg.theta2}, {"sigma2", cfg.sigma2}, {"grid_n", cfg.grid_n}, {"seed", cfg.seed},
          {"out", cfg.out},       {"format", cfg.format}, {"b", cfg.b},           {"g", cfg.g},
          {"L", cfg.L},           {"trials", cfg.trials}, {"rate_fraction", cfg.rate_fraction},
          {"pulse_csv", cfg.pulse_csv}, {"draws", cfg.draws}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-frequency waterfilling toolkit"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    double gamma = 0, theta2 = 0, sigma2 = 0, rate_fraction = 0;
    std::vector<double> r, snr, sdr, b;
    std::vector<std::string> g;
    std::vector<int> L;
    long grid_n = 0;
    std::uint64_t seed = 0, trials = 0, draws = 0;
    std::string out, format, pulse_csv;
  } flags;

  struct Bound {
    CLI::App* sub;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
  };
  std::vector<Bound> subs;

  auto add = [&](const std::string& name, const std::string& help) {
    Bound bd{app.add_subcommand(name, help), {}};
    auto* s = bd.sub;
    auto reg = [&](const std::string& key, CLI::Option* o) { bd.opts.emplace_back(key, o); };
    s->add_option("--config", flags.config, "JSON config file (keys as flag names, '-' -> '_')");
    reg("gamma", s->add_option("--gamma", flags.gamma, "Dilation gamma of the Gaussian symbol"));
    reg("r", s->add_option("--r", flags.r, "Spreading factors, comma separated")->delimiter(','));
    reg("snr", s->add_option("--snr", flags.snr, "Signal-to-noise ratios")->delimiter(','));
    reg("sdr", s->add_option("--sdr", flags.sdr, "Signal-to-distortion ratios")->delimiter(','));
    reg("theta2", s->add_option("--theta2", flags.theta2, "Noise PSD theta^2"));
    reg("sigma2", s->add_option("--sigma2", flags.sigma2, "Source PSD sigma^2"));
    reg("grid_n", s->add_option("--grid-n", flags.grid_n, "Grid size n_t (power of two, 0 = automatic)"));
    reg("seed", s->add_option("--seed", flags.seed, "RNG seed"));
    reg("out", s->add_option("--out", flags.out, "Output path (default stdout)"));
    reg("format", s->add_option("--format", flags.format, "csv or json"));
    return bd;
  };

  auto capacity = add("capacity", "Exact, time-frequency and closed-form capacity over r and SNR");
  auto rate = add("rate", "Exact, time-frequency and closed-form rate over r and SDR");
  auto szego = add("szego", "Szego gaps of eigenvalue sums against phase-space integrals");
  szego.opts.emplace_back("b", szego.sub->add_option("--b", flags.b, "Scale b in g(b x)")->delimiter(','));
  szego.opts.emplace_back("g", szego.sub->add_option("--g", flags.g, "identity, half_log_plus, min_one")->delimiter(','));
  auto eoc_cmd = add("eoc", "Ellipse of concentration and spreading-factor bound");
  auto sim = add("simulate", "Monte Carlo pulse-train coding experiment");
  sim.opts.emplace_back("L", sim.sub->add_option("--L", flags.L, "Pulses per codeword")->delimiter(','));
  sim.opts.emplace_back("trials", sim.sub->add_option("--trials", flags.trials, "Monte Carlo trials"));
  sim.opts.emplace_back("rate_fraction", sim.sub->add_option("--rate-fraction", flags.rate_fraction, "R_k / C_k"));
  sim.opts.emplace_back("pulse_csv", sim.sub->add_option("--pulse-csv", flags.pulse_csv, "Write one pulse train as CSV"));
  auto wvs_cmd = add("wvs", "Wigner-Ville spectrum of the heat-channel source");
  wvs_cmd.opts.emplace_back("draws", wvs_cmd.sub->add_option("--draws", flags.draws, "Monte Carlo draws for the empirical WVS"));
  subs = {capacity, rate, szego, eoc_cmd, sim, wvs_cmd};

  std::vector<const char*> argv{"tfwf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 1;
  }

  RunConfig cfg;
  const Bound* chosen = nullptr;
  for (const auto& s : subs)
    if (s.sub->parsed()) chosen = &s;
  cfg.command = chosen->sub->get_name();

  try {
    set_threads();
    apply_command_defaults(cfg);
    if (!flags.config.empty()) {
      std::ifstream f(flags.config);
      if (!f) throw UsageError("cannot open config file " + flags.config);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
      }
      apply_json(cfg, j);
    }
    json overrides = json::object();
    for (const auto& [key, opt] : chosen->opts) {
      if (opt->count() == 0) continue;
      if (key == "gamma") overrides[key] = flags.gamma;
      else if (key == "r") overrides[key] = flags.r;
      else if (key == "snr") overrides[key] = flags.snr;
      else if (key == "sdr") overrides[key] = flags.sdr;
      else if (key == "theta2") overrides[key] = flags.theta2;
      else if (key == "sigma2") overrides[key] = flags.sigma2;
      else if (key == "grid_n") overrides[key] = flags.grid_n;
      else if (key == "seed") overrides[key] = flags.seed;
      else if (key == "out") overrides[key] = flags.out;
      else if (key == "format") overrides[key] = flags.format;
      else if (key == "b") overrides[key] = flags.b;
      else if (key == "g") overrides[key] = flags.g;
      else if (key == "L") overrides[key] = flags.L;
      else if (key == "trials") overrides[key] = flags.trials;
      else if (key == "rate_fraction") overrides[key] = flags.rate_fraction;
      else if (key == "pulse_csv") overrides[key] = flags.pulse_csv;
      else if (key == "draws") overrides[key] = flags.draws;
    }
    apply_json(cfg, overrides);
    check_config(cfg);
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 1;
  }

  try {
    Output result;
    if (cfg.command == "capacity") result = cmd_capacity(cfg);
    else if (cfg.command == "rate") result = cmd_rate(cfg);
    else if (cfg.command == "szego") result = cmd_szego(cfg);
    else if (cfg.command == "eoc") result = cmd_eoc(cfg);
    else if (cfg.command == "simulate") result = cmd_simulate(cfg);
    else result = cmd_wvs(cfg);

    if (cfg.out.empty())
      out << result.text;
    else
      write_file_atomic(cfg.out, result.text);
    return 0;
  } catch (const GridTooSmall& e) {
    err << error_json("grid_too_small", e.what()).dump() << "\n";
  } catch (const ConvergenceError& e) {
    err << error_json("convergence_error", e.what()).dump() << "\n";
  } catch (const DomainError& e) {
    err << error_json("domain_error", e.what()).dump() << "\n";
  } catch (const std::exception& e) {
    err << error_json("error", e.what()).dump() << "\n";
  }
  return 2;
}

}  // namespace tfwf::cli
