#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "tfwf/coding_sim.hpp"
#include "tfwf/errors.hpp"
#include "tfwf/heat_channel.hpp"

using namespace tfwf;

TEST_CASE("codebook sizes") {
  CHECK(codebook_bits(std::log(2.0), 4) == 4);
  CHECK(codebook_bits(0.7 * std::log(2.0), 4) == 2);
  CHECK(codebook_bits(0.0, 8) == 0);
  CHECK_THROWS_AS(codebook_bits(-1.0, 4), DomainError);
}

TEST_CASE("heat pulses are orthonormal and confined to their slot") {
  const auto m = heat_model(1.0, 2.0);
  const auto basis = heat_pulse_basis(m, 6, default_pulse_delay(1.0, 2.0));
  const Eigen::MatrixXd gram = basis.dtau() * basis.f.transpose() * basis.f;
  CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(heat_pulse_basis(m, 6, 2.0), DomainError);
}

TEST_CASE("example configuration allocates eleven subchannels") {
  const auto cfg = heat_coding_config(0.1, 2.0, 100.0, 0.01, 4, 0.7, 1);
  CHECK(cfg.basis.channels() == 11);
  CHECK(cfg.allocation.K == 11);
  CHECK(cfg.allocation.capacity_nats == doctest::Approx(15.7277).epsilon(1e-5));
  const Eigen::VectorXd caps = subchannel_capacities(cfg);
  CHECK(caps.sum() == doctest::Approx(cfg.allocation.capacity_nats).epsilon(1e-12));
  for (Eigen::Index k = 0; k < caps.size(); ++k) CHECK(cfg.rates_nats(k) < caps(k));
}

TEST_CASE("codebooks are deterministic and respect the rate") {
  const auto cfg = heat_coding_config(1.0, 1.0, 2.0, 0.01, 8, 0.7, 9);
  const auto a = build_codebooks(cfg);
  const auto b = build_codebooks(cfg);
  REQUIRE(a.books.size() == b.books.size());
  for (std::size_t k = 0; k < a.books.size(); ++k) {
    CHECK(a.books[k] == b.books[k]);
    CHECK(a.books[k].rows() == (Eigen::Index{1} << codebook_bits(cfg.rates_nats(k), cfg.L)));
    CHECK(a.books[k].cols() == cfg.L);
  }
  auto bad = cfg;
  bad.rates_nats(0) = subchannel_capacities(cfg)(0);
  CHECK_THROWS_AS(build_codebooks(bad), DomainError);
}

TEST_CASE("noiseless chain recovers every codeword") {
  auto cfg = heat_coding_config(1.0, 2.0, 10.0, 0.01, 4, 0.7, 4);
  const auto books = build_codebooks(cfg);
  Message msg(books.books.size());
  for (std::size_t k = 0; k < msg.size(); ++k) msg[k] = static_cast<std::uint64_t>(books.books[k].rows() - 1) / 2;
  const Eigen::VectorXd u = encode(cfg, books, msg);
  CHECK(u.size() == cfg.L * cfg.basis.tau.size());
  CHECK(train_times(cfg).size() == u.size());

  // Matched filter inverts the filter exactly when there is no noise.
  const Eigen::MatrixXd ahat = matched_filter(cfg, apply_filter(cfg, u));
  for (std::size_t k = 0; k < msg.size(); ++k)
    CHECK((ahat.row(static_cast<Eigen::Index>(k)) - books.books[k].row(static_cast<Eigen::Index>(msg[k]))).norm() < 1e-8);
  CHECK(decode(books, ahat) == msg);

  cfg.theta2 = 0.0;
  CHECK(channel(cfg, u, 0) == apply_filter(cfg, u));
  const auto rep = simulate(cfg, 200);
  CHECK(rep.message_error_rate == 0.0);
}

TEST_CASE("simulation statistics") {
  const auto cfg = heat_coding_config(0.1, 2.0, 100.0, 0.01, 4, 0.7, 1);
  const auto rep = simulate(cfg, 1000);
  const double n = 1000.0 * cfg.L;
  for (Eigen::Index k = 0; k < rep.noise_variance.size(); ++k) {
    const double nu2 = rep.expected_noise_variance(k);
    CHECK(std::abs(rep.noise_variance(k) - nu2) < 4.0 * nu2 * std::sqrt(2.0 / n));
    CHECK(std::abs(rep.noise_mean(k)) < 4.0 * std::sqrt(nu2 / n));
  }
  CHECK(rep.max_cross_correlation < rep.cross_correlation_bound);
  CHECK(rep.rate_bits_per_pulse < rep.capacity_bits_per_pulse);

  const auto again = simulate(cfg, 1000);
  CHECK(again.codeword_errors == rep.codeword_errors);
  CHECK(again.noise_variance == rep.noise_variance);
}

TEST_CASE("pulse train csv") {
  const auto cfg = heat_coding_config(1.0, 1.0, 2.0, 0.01, 4, 0.7, 2);
  const auto books = build_codebooks(cfg);
  const auto table = pulse_train_csv(cfg, books, Message(books.books.size(), 0));
  CHECK(table.header() == std::vector<std::string>{"t", "u", "Pu"});
  CHECK(table.rows() == static_cast<std::size_t>(cfg.L * cfg.basis.tau.size()));
}
