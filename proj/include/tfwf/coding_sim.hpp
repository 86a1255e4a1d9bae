#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tfwf/heat_channel.hpp"
#include "tfwf/io.hpp"
#include "tfwf/waterfilling.hpp"

namespace tfwf {

/// Input and output pulse shapes f_k, g_k of K subchannels sampled on one
/// pulse slot (-d/2, d/2) at midpoints tau_j = -d/2 + (j + 1/2) dtau.
struct PulseBasis {
  double d = 0.0;
  Eigen::VectorXd tau;
  Eigen::MatrixXd f;
  Eigen::MatrixXd g;
  Eigen::VectorXd lambdas;

  double dtau() const { return d / static_cast<double>(tau.size()); }
  Eigen::Index channels() const { return f.cols(); }
};

/// Default delay 6 sqrt(2) r gamma (six approximate EoC time semi-axes).
double default_pulse_delay(double gamma, double r);

/// Dilated Hermite pulses f_k = g_k for the heat channel, k < K.
/// Throws DomainError if any pulse puts more than 1e-6 of its energy outside the slot.
PulseBasis heat_pulse_basis(const HeatChannelModel& m, Eigen::Index K, double d, Eigen::Index samples = 256);

struct CodingConfig {
  PulseBasis basis;
  /// Waterfilling over (at least) the basis channels; powers(k) feeds codebook k.
  WaterfillResult allocation;
  /// Target R_k in nats per pulse, one per basis channel.
  Eigen::VectorXd rates_nats;
  int L = 8;
  double theta2 = 0.0;
  std::uint64_t seed = 0;
};

/// Heat-channel experiment: S = 2 pi r^2 theta^2 SNR, waterfilling over
/// nu_k^2 = theta^2 / lambda_k, one subchannel per active channel and
/// R_k = rate_fraction C_k.
CodingConfig heat_coding_config(double gamma, double r, double snr, double theta2, int L, double rate_fraction,
                                std::uint64_t seed, double d = 0.0);

/// Per-subchannel capacity C_k = (1/2) ln(sigma^2 / nu_k^2) in nats.
Eigen::VectorXd subchannel_capacities(const CodingConfig& cfg);

/// Codebook size exponent floor(R_k L / ln 2) in bits.
int codebook_bits(double rate_nats, int L);

inline constexpr int kMaxCodebookBits = 16;

struct Codebooks {
  /// books[k] is M_k x L; row m is codeword a_k(m).
  std::vector<Eigen::MatrixXd> books;
};

/// Gaussian codebooks with per-letter variance sigma^2 - nu_k^2.
/// Refuses R_k >= C_k and codebooks beyond 2^16 words.
Codebooks build_codebooks(const CodingConfig& cfg);

/// Message: one codeword index per subchannel.
using Message = std::vector<std::uint64_t>;

/// Pulse train u(t) = sum_l sum_k a_kl f_k(t - l d), sampled slot by slot
/// (L * samples values, slot l first).
Eigen::VectorXd encode(const CodingConfig& cfg, const Codebooks& books, const Message& m);

/// Time axis of a pulse train: l d + tau_j.
Eigen::VectorXd train_times(const CodingConfig& cfg);

/// y = P_r u + n, with P_r applied slot-wise through its singular system and n
/// white with per-sample variance theta^2 / dtau. `trial` selects the noise substream.
Eigen::VectorXd channel(const CodingConfig& cfg, const Eigen::VectorXd& u, std::uint64_t trial);

/// Noiseless P_r u.
Eigen::VectorXd apply_filter(const CodingConfig& cfg, const Eigen::VectorXd& u);

/// Matched-filter outputs ahat_kl = <y_l, g_k> / sqrt(lambda_k), K x L.
Eigen::MatrixXd matched_filter(const CodingConfig& cfg, const Eigen::VectorXd& y);

/// Nearest-codeword decision per subchannel.
Message decode(const Codebooks& books, const Eigen::MatrixXd& ahat);

struct DecodingReport {
  std::uint64_t trials = 0;
  int L = 0;
  Eigen::VectorXi codebook_bits;
  Eigen::VectorXi codeword_errors;
  Eigen::VectorXd error_rates;
  /// Standard error of each error rate.
  Eigen::VectorXd error_rate_stderr;
  /// Message error rate (any subchannel wrong).
  double message_error_rate = 0.0;
  /// Mean of sum_k a_kl^2 over pulses, and the mean of the sampled train energy per pulse.
  double input_energy_per_pulse = 0.0;
  double train_energy_per_pulse = 0.0;
  /// Waterfilling budget S.
  double energy_budget = 0.0;
  /// Empirical mean and variance of z_kl = ahat_kl - a_kl, and nu_k^2 = theta^2 / lambda_k.
  Eigen::VectorXd noise_mean;
  Eigen::VectorXd noise_variance;
  Eigen::VectorXd expected_noise_variance;
  /// max_{j != k} |corr(z_j, z_k)| and its 3-sigma CLT bound 3 / sqrt(samples).
  double max_cross_correlation = 0.0;
  double cross_correlation_bound = 0.0;
  /// sum_k floor(R_k L) / L in bits per pulse.
  double rate_bits_per_pulse = 0.0;
  /// sum_k C_k in bits per pulse.
  double capacity_bits_per_pulse = 0.0;
};

/// Monte Carlo run of encode -> channel -> matched filter -> ML decode.
/// Trial t draws its message and noise from substreams (seed, t), so results
/// do not depend on scheduling.
DecodingReport simulate(const CodingConfig& cfg, std::uint64_t trials);

/// Columns t, u, Pu for one message (noiseless output).
CsvTable pulse_train_csv(const CodingConfig& cfg, const Codebooks& books, const Message& m);

}  // namespace tfwf
