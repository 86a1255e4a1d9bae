#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "doctest.h"
#include "tfwf/errors.hpp"
#include "tfwf/heat_channel.hpp"
#include "tfwf/waterfilling.hpp"

using namespace tfwf;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}
}  // namespace

TEST_CASE("waterfilling by hand") {
  // Levels 1, 2, 4 with S = 3: water at 3, channel 3 stays dry.
  const auto w = waterfill_discrete(vec({1.0, 2.0, 4.0}), 3.0);
  CHECK(w.K == 2);
  CHECK(w.water_level == doctest::Approx(3.0));
  CHECK(w.powers(0) == doctest::Approx(2.0));
  CHECK(w.powers(1) == doctest::Approx(1.0));
  CHECK(w.powers(2) == 0.0);
  CHECK(w.capacity_nats == doctest::Approx(0.5 * std::log(3.0) + 0.5 * std::log(1.5)));

  // Exactly reaching a level leaves that channel inactive.
  const auto edge = waterfill_discrete(vec({1.0, 2.0}), 1.0);
  CHECK(edge.K == 1);
  CHECK(edge.water_level == doctest::Approx(2.0));

  const double inf = std::numeric_limits<double>::infinity();
  const auto tail = waterfill_discrete(vec({1.0, inf}), 5.0);
  CHECK(tail.K == 1);
  CHECK(tail.water_level == doctest::Approx(6.0));
  CHECK_THROWS(waterfill_discrete(vec({1.0}), 0.0));
}

TEST_CASE("waterfilling satisfies the KKT conditions") {
  const auto m = heat_model(1.0, 2.0);
  const Eigen::VectorXd noise = 0.01 * eigenvalues(m).cwiseInverse();
  const double S = 2.0 * std::numbers::pi * 4.0 * 0.01 * 100.0;
  const auto w = waterfill_discrete(noise, S);
  CHECK(w.powers.sum() == doctest::Approx(S).epsilon(1e-13));
  for (Eigen::Index k = 0; k < noise.size(); ++k) {
    if (k < w.K) {
      CHECK(w.powers(k) + noise(k) == doctest::Approx(w.water_level).epsilon(1e-13));
    } else {
      CHECK(w.powers(k) == 0.0);
      CHECK(noise(k) >= w.water_level);
    }
  }
  CHECK(w.K == 11);
  CHECK(w.capacity_nats == doctest::Approx(15.7277).epsilon(1e-5));
}

TEST_CASE("capacity grows with S and theta^2 doubling equals halving S") {
  const Eigen::VectorXd lam = eigenvalues(heat_model(1.0, 2.0));
  double prev = 0.0;
  for (double S : {0.1, 1.0, 10.0, 100.0}) {
    const double c = waterfill_discrete(0.01 * lam.cwiseInverse(), S).capacity_nats;
    CHECK(c > prev);
    prev = c;
    const double doubled = waterfill_discrete(0.02 * lam.cwiseInverse(), S).capacity_nats;
    const double halved = waterfill_discrete(0.01 * lam.cwiseInverse(), S / 2.0).capacity_nats;
    CHECK(doubled == doctest::Approx(halved).epsilon(1e-13));
  }
}

TEST_CASE("reverse waterfilling by hand") {
  const auto r = reverse_waterfill_discrete(vec({4.0, 2.0, 1.0}), 3.0);
  // theta = 1: distortions 1, 1, 1.
  CHECK(r.water_table == doctest::Approx(1.0));
  CHECK(r.K == 2);
  CHECK(r.distortions.sum() == doctest::Approx(3.0));
  CHECK(r.rate_nats == doctest::Approx(0.5 * std::log(4.0) + 0.5 * std::log(2.0)));

  const auto low = reverse_waterfill_discrete(vec({4.0, 2.0, 1.0}), 1.5);
  CHECK(low.water_table == doctest::Approx(0.5));
  CHECK(low.K == 3);

  const auto all = reverse_waterfill_discrete(vec({4.0, 2.0, 1.0}), 7.0);
  CHECK(all.trivial);
  CHECK(all.rate_nats == 0.0);
  CHECK_THROWS(reverse_waterfill_discrete(vec({4.0, 2.0}), 7.0));
  CHECK_THROWS(reverse_waterfill_discrete(vec({4.0, 2.0}), 0.0));
}

TEST_CASE("time-frequency capacity agrees with the closed form") {
  const auto p = heat_symbol(1.0);
  for (double r : {2.0, 8.0}) {
    const double S = 2.0 * std::numbers::pi * r * r * 0.01 * 100.0;
    const auto tf = tf_capacity(p, r, S, 0.01);
    CHECK(tf.value_nats == doctest::Approx(closed_form_capacity(100.0, r).value_nats).epsilon(1e-9));
    CHECK(tf.achieved_constraint == doctest::Approx(S).epsilon(1e-11));
    CHECK(tf.region_area > 0.0);
  }
}

TEST_CASE("time-frequency rate agrees with the closed form") {
  const auto p = heat_symbol(1.0);
  for (double r : {2.0, 8.0}) {
    const double E = r * r / 2.0;
    const auto tf = tf_rate(p, r, E / 10.0, 1.0);
    CHECK(tf.value_nats == doctest::Approx(closed_form_rate(10.0, r).value_nats).epsilon(1e-9));
    CHECK(tf.achieved_constraint == doctest::Approx(E / 10.0).epsilon(1e-11));
  }
  CHECK(tf_rate(p, 2.0, 2.0, 1.0).value_nats == 0.0);
  CHECK_THROWS(tf_rate(p, 2.0, 5.0, 1.0));
}

TEST_CASE("time-frequency integrals are invariant under gamma") {
  const double S = 2.0 * std::numbers::pi * 4.0 * 0.01 * 100.0;
  const double a = tf_capacity(heat_symbol(1.0), 2.0, S, 0.01).value_nats;
  const double b = tf_capacity(heat_symbol(0.1), 2.0, S, 0.01).value_nats;
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}
