#include "tfwf/coding_sim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tfwf/errors.hpp"
#include "tfwf/random.hpp"
#include "tfwf/special_functions.hpp"

namespace tfwf {

namespace {

constexpr std::uint64_t kCodebookStream = 0x636f6465ULL;
constexpr std::uint64_t kMessageStream = 0x6d736721ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;

void check_shapes(const CodingConfig& cfg) {
  const auto K = cfg.basis.channels();
  if (K == 0) throw DomainError("coding: no subchannels");
  if (cfg.basis.g.cols() != K || cfg.basis.lambdas.size() != K || cfg.basis.f.rows() != cfg.basis.tau.size() ||
      cfg.basis.g.rows() != cfg.basis.tau.size())
    throw DomainError("coding: pulse basis shapes are inconsistent");
  if (cfg.rates_nats.size() != K) throw DomainError("coding: one rate per subchannel required");
  if (cfg.allocation.powers.size() < K) throw DomainError("coding: allocation has fewer channels than the basis");
  if (cfg.L < 1) throw DomainError("coding: L must be >= 1");
  if (!(cfg.theta2 >= 0.0)) throw DomainError("coding: theta^2 must be non-negative");
}

}  // namespace

double default_pulse_delay(double gamma, double r) { return 6.0 * std::numbers::sqrt2 * r * gamma; }

PulseBasis heat_pulse_basis(const HeatChannelModel& m, Eigen::Index K, double d, Eigen::Index samples) {
  if (K < 1) throw DomainError("heat_pulse_basis: need at least one pulse");
  if (!(d > 0.0)) throw DomainError("heat_pulse_basis: delay must be positive");
  if (samples < 8) throw DomainError("heat_pulse_basis: too few samples per slot");
  PulseBasis b;
  b.d = d;
  b.tau.resize(samples);
  const double dtau = d / static_cast<double>(samples);
  for (Eigen::Index j = 0; j < samples; ++j) b.tau(j) = -0.5 * d + (static_cast<double>(j) + 0.5) * dtau;

  const HermiteBasis<double> hermite(m.gamma, static_cast<int>(K) - 1);
  b.f.resize(samples, K);
  for (Eigen::Index j = 0; j < samples; ++j) b.f.row(j) = hermite.all(b.tau(j)).transpose();
  b.g = b.f;
  b.lambdas.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) b.lambdas(k) = eigenvalue(m, static_cast<int>(k));

  const Eigen::VectorXd inside = b.f.colwise().squaredNorm().transpose() * dtau;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double outside = std::abs(1.0 - inside(k));
    if (outside > 1e-6) {
      std::ostringstream msg;
      msg << "pulse " << k << " leaves " << outside << " of its energy outside the slot of width " << d
          << "; increase the delay d";
      throw DomainError(msg.str());
    }
  }
  return b;
}

CodingConfig heat_coding_config(double gamma, double r, double snr, double theta2, int L, double rate_fraction,
                                std::uint64_t seed, double d) {
  if (!(snr > 0.0)) throw DomainError("heat_coding_config: SNR must be positive");
  if (!(theta2 > 0.0)) throw DomainError("heat_coding_config: theta^2 must be positive");
  if (!(rate_fraction > 0.0 && rate_fraction < 1.0))
    throw DomainError("heat_coding_config: rate fraction must lie in (0, 1)");
  const auto m = heat_model(gamma, r);
  const Eigen::VectorXd lambdas = eigenvalues(m, 1e-14);
  const Eigen::VectorXd noise = theta2 * lambdas.cwiseInverse();
  const double S = 2.0 * std::numbers::pi * r * r * theta2 * snr;

  CodingConfig cfg;
  cfg.allocation = waterfill_discrete(noise, S);
  cfg.basis = heat_pulse_basis(m, cfg.allocation.K, d > 0.0 ? d : default_pulse_delay(gamma, r));
  cfg.L = L;
  cfg.theta2 = theta2;
  cfg.seed = seed;
  cfg.rates_nats = rate_fraction * subchannel_capacities(cfg);
  return cfg;
}

Eigen::VectorXd subchannel_capacities(const CodingConfig& cfg) {
  const auto K = cfg.basis.channels();
  const double level = cfg.allocation.water_level;
  Eigen::VectorXd c(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double noise = level - cfg.allocation.powers(k);
    c(k) = noise > 0.0 ? 0.5 * std::log(level / noise) : 0.0;
  }
  return c;
}

int codebook_bits(double rate_nats, int L) {
  if (!(rate_nats >= 0.0)) throw DomainError("codebook_bits: rate must be non-negative");
  // A hair of slack so exact products like 0.75 * 4 are not floored to 2.
  const double bits = rate_nats * L / std::numbers::ln2;
  return static_cast<int>(std::floor(bits * (1.0 + 1e-12)));
}

Codebooks build_codebooks(const CodingConfig& cfg) {
  check_shapes(cfg);
  const Eigen::VectorXd caps = subchannel_capacities(cfg);
  Codebooks out;
  for (Eigen::Index k = 0; k < cfg.basis.channels(); ++k) {
    if (!(cfg.rates_nats(k) < caps(k))) {
      std::ostringstream msg;
      msg << "subchannel " << k << ": rate " << cfg.rates_nats(k) << " nats is not below capacity " << caps(k);
      throw DomainError(msg.str());
    }
    const int bits = codebook_bits(cfg.rates_nats(k), cfg.L);
    if (bits > kMaxCodebookBits) {
      std::ostringstream msg;
      msg << "subchannel " << k << ": codebook of 2^" << bits << " words exceeds the 2^" << kMaxCodebookBits
          << " limit for exhaustive ML decoding; lower L or the rate";
      throw DomainError(msg.str());
    }
    const Eigen::Index words = Eigen::Index{1} << bits;
    const double sd = std::sqrt(cfg.allocation.powers(k));
    Rng rng(cfg.seed, {kCodebookStream, static_cast<std::uint64_t>(k)});
    Eigen::MatrixXd book(words, cfg.L);
    for (Eigen::Index m = 0; m < words; ++m)
      for (int l = 0; l < cfg.L; ++l) book(m, l) = sd * rng.normal();
    out.books.push_back(std::move(book));
  }
  return out;
}

Eigen::VectorXd encode(const CodingConfig& cfg, const Codebooks& books, const Message& m) {
  check_shapes(cfg);
  const auto K = cfg.basis.channels();
  if (static_cast<Eigen::Index>(m.size()) != K || static_cast<Eigen::Index>(books.books.size()) != K)
    throw DomainError("encode: one codeword index per subchannel required");
  const Eigen::Index J = cfg.basis.tau.size();
  Eigen::MatrixXd a(K, cfg.L);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (m[k] >= static_cast<std::uint64_t>(books.books[k].rows())) throw DomainError("encode: message index out of range");
    a.row(k) = books.books[k].row(static_cast<Eigen::Index>(m[k]));
  }
  Eigen::VectorXd u(J * cfg.L);
  Eigen::Map<Eigen::MatrixXd>(u.data(), J, cfg.L) = cfg.basis.f * a;
  return u;
}

Eigen::VectorXd train_times(const CodingConfig& cfg) {
  const Eigen::Index J = cfg.basis.tau.size();
  Eigen::VectorXd t(J * cfg.L);
  for (int l = 0; l < cfg.L; ++l) t.segment(l * J, J) = cfg.basis.tau.array() + l * cfg.basis.d;
  return t;
}

Eigen::VectorXd apply_filter(const CodingConfig& cfg, const Eigen::VectorXd& u) {
  const Eigen::Index J = cfg.basis.tau.size();
  if (u.size() != J * cfg.L) throw DomainError("channel: input length does not match L slots");
  const auto slots = Eigen::Map<const Eigen::MatrixXd>(u.data(), J, cfg.L);
  // <u_l, f_k> per slot, scaled by sqrt(lambda_k), re-synthesized on g_k.
  const Eigen::MatrixXd coeff = cfg.basis.f.transpose() * slots * cfg.basis.dtau();
  Eigen::VectorXd y(J * cfg.L);
  Eigen::Map<Eigen::MatrixXd>(y.data(), J, cfg.L) =
      cfg.basis.g * (cfg.basis.lambdas.cwiseSqrt().asDiagonal() * coeff);
  return y;
}

Eigen::VectorXd channel(const CodingConfig& cfg, const Eigen::VectorXd& u, std::uint64_t trial) {
  Eigen::VectorXd y = apply_filter(cfg, u);
  if (cfg.theta2 > 0.0) {
    Rng rng(cfg.seed, {kNoiseStream, trial});
    const double sd = std::sqrt(cfg.theta2 / cfg.basis.dtau());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  }
  return y;
}

Eigen::MatrixXd matched_filter(const CodingConfig& cfg, const Eigen::VectorXd& y) {
  const Eigen::Index J = cfg.basis.tau.size();
  if (y.size() != J * cfg.L) throw DomainError("matched_filter: signal length does not match L slots");
  const auto slots = Eigen::Map<const Eigen::MatrixXd>(y.data(), J, cfg.L);
  return cfg.basis.lambdas.cwiseSqrt().cwiseInverse().asDiagonal() * (cfg.basis.g.transpose() * slots) *
         cfg.basis.dtau();
}

Message decode(const Codebooks& books, const Eigen::MatrixXd& ahat) {
  if (static_cast<Eigen::Index>(books.books.size()) != ahat.rows()) throw DomainError("decode: subchannel count mismatch");
  Message out(books.books.size());
  for (std::size_t k = 0; k < books.books.size(); ++k) {
    const auto& book = books.books[k];
    Eigen::Index best = 0;
    (book.rowwise() - ahat.row(static_cast<Eigen::Index>(k))).rowwise().squaredNorm().minCoeff(&best);
    out[k] = static_cast<std::uint64_t>(best);
  }
  return out;
}

DecodingReport simulate(const CodingConfig& cfg, std::uint64_t trials) {
  check_shapes(cfg);
  if (trials == 0) throw DomainError("simulate: need at least one trial");
  const Codebooks books = build_codebooks(cfg);
  const auto K = cfg.basis.channels();

  DecodingReport rep;
  rep.trials = trials;
  rep.L = cfg.L;
  rep.codebook_bits.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) rep.codebook_bits(k) = codebook_bits(cfg.rates_nats(k), cfg.L);
  rep.codeword_errors = Eigen::VectorXi::Zero(K);
  rep.energy_budget = cfg.allocation.powers.sum();

  Eigen::VectorXd z_sum = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXd z_outer = Eigen::MatrixXd::Zero(K, K);
  std::uint64_t message_errors = 0;
  double letter_energy = 0.0;
  double train_energy = 0.0;

  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng pick(cfg.seed, {kMessageStream, t});
    Message m(K);
    for (Eigen::Index k = 0; k < K; ++k) m[k] = pick.below(static_cast<std::uint64_t>(books.books[k].rows()));

    const Eigen::VectorXd u = encode(cfg, books, m);
    const Eigen::VectorXd y = channel(cfg, u, t);
    const Eigen::MatrixXd ahat = matched_filter(cfg, y);
    const Message est = decode(books, ahat);

    Eigen::MatrixXd a(K, cfg.L);
    bool any = false;
    for (Eigen::Index k = 0; k < K; ++k) {
      a.row(k) = books.books[k].row(static_cast<Eigen::Index>(m[k]));
      if (est[k] != m[k]) {
        ++rep.codeword_errors(k);
        any = true;
      }
    }
    letter_energy += a.squaredNorm();
    const Eigen::MatrixXd z = ahat - a;
    z_sum += z.rowwise().sum();
    z_outer += z * z.transpose();
    train_energy += u.squaredNorm() * cfg.basis.dtau();
    if (any) ++message_errors;
  }

  const double pulses = static_cast<double>(trials) * cfg.L;
  rep.error_rates = rep.codeword_errors.cast<double>() / static_cast<double>(trials);
  rep.error_rate_stderr = (rep.error_rates.array() * (1.0 - rep.error_rates.array()) / static_cast<double>(trials)).sqrt();
  rep.message_error_rate = static_cast<double>(message_errors) / static_cast<double>(trials);
  rep.input_energy_per_pulse = letter_energy / pulses;
  rep.train_energy_per_pulse = train_energy / pulses;

  rep.noise_mean = z_sum / pulses;
  const Eigen::MatrixXd cov = z_outer / pulses - rep.noise_mean * rep.noise_mean.transpose();
  rep.noise_variance = cov.diagonal();
  rep.expected_noise_variance = cfg.theta2 * cfg.basis.lambdas.cwiseInverse();
  for (Eigen::Index j = 0; j < K; ++j)
    for (Eigen::Index k = 0; k < j; ++k) {
      const double denom = std::sqrt(cov(j, j) * cov(k, k));
      if (denom > 0.0) rep.max_cross_correlation = std::max(rep.max_cross_correlation, std::abs(cov(j, k)) / denom);
    }
  rep.cross_correlation_bound = 3.0 / std::sqrt(pulses);

  const Eigen::VectorXd caps = subchannel_capacities(cfg);
  rep.rate_bits_per_pulse = rep.codebook_bits.cast<double>().sum() / cfg.L;
  rep.capacity_bits_per_pulse = caps.sum() / std::numbers::ln2;
  return rep;
}

CsvTable pulse_train_csv(const CodingConfig& cfg, const Codebooks& books, const Message& m) {
  const Eigen::VectorXd u = encode(cfg, books, m);
  const Eigen::VectorXd pu = apply_filter(cfg, u);
  const Eigen::VectorXd t = train_times(cfg);
  CsvTable table({"t", "u", "Pu"});
  for (Eigen::Index i = 0; i < t.size(); ++i) table.add_row({t(i), u(i), pu(i)});
  return table;
}

}  // namespace tfwf
