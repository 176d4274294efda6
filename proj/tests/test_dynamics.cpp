#include "lfc/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"

using namespace lfc;

namespace {

NetworkParams capacity_params(double cap) {
  NetworkParams p = default_params();
  for (auto& a : p.areas) a.set_capacity(cap);
  return p;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero is a fixed point of the baseline model") {
  const Topology topo = build_eea_topology();
  const NetworkParams p = capacity_params(10.0);
  const NetworkState next = step_linear(NetworkState{}, NetworkInput{}, ExogenousVec{}, topo, p);
  for (const AreaState& s : next.areas) {
    CHECK(s.d_delta == 0.0);
    CHECK(s.d_f == 0.0);
    CHECK(s.e == 0.0);
  }
}

TEST_CASE("baseline step matches the dense matrix oracle") {
  const Topology topo = build_eea_topology();
  const NetworkParams p = capacity_params(10.0);
  const test::DenseModel m = test::dense_model(topo, p);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    NetworkState x;
    NetworkInput u;
    ExogenousVec w;
    for (int i = 0; i < kAreaCount; ++i) {
      x.areas[static_cast<std::size_t>(i)] = {dist(rng), dist(rng), dist(rng)};
      u[static_cast<std::size_t>(i)] = {dist(rng), dist(rng), dist(rng)};
      w[static_cast<std::size_t>(i)] = {dist(rng), dist(rng)};
    }
    const NetworkState next = step_linear(x, u, w, topo, p);

    Eigen::VectorXd xv(kStateDim), uv(kInputDim), wv(kExoDim);
    const auto xf = flatten(x);
    const auto uf = flatten(u);
    for (int i = 0; i < kStateDim; ++i) xv(i) = xf[static_cast<std::size_t>(i)];
    for (int i = 0; i < kInputDim; ++i) uv(i) = uf[static_cast<std::size_t>(i)];
    for (int i = 0; i < kAreaCount; ++i) {
      wv(2 * i) = w[static_cast<std::size_t>(i)].d_p_load;
      wv(2 * i + 1) = w[static_cast<std::size_t>(i)].d_p_ren;
    }
    const Eigen::VectorXd expect = m.a * xv + m.b * uv + m.e * wv;
    const auto nf = flatten(next);
    for (int i = 0; i < kStateDim; ++i) {
      const double scale = std::max(1.0, std::abs(expect(i)));
      CHECK(std::abs(nf[static_cast<std::size_t>(i)] - expect(i)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("unit dispatch step from rest moves frequency by 5 mHz") {
  const Topology topo = build_eea_topology();
  const NetworkParams p = capacity_params(10.0);
  NetworkInput u{};
  u[0].d_p_disp = 1.0;
  const NetworkState next = step_linear(NetworkState{}, u, ExogenousVec{}, topo, p);
  CHECK(next.areas[0].d_delta == 0.0);
  CHECK(next.areas[0].d_f == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(next.areas[0].e == 0.0);
  for (int i = 1; i < kAreaCount; ++i) CHECK(next.areas[static_cast<std::size_t>(i)].d_f == 0.0);
}

TEST_CASE("piecewise storage update") {
  AreaParams a;
  a.set_capacity(10.0);
  const double tau = 2.5;
  // Charging piece applies eta_c, discharging divides by eta_d.
  CHECK(step_pwa_ess(5.0, 2.0, a, tau) == doctest::Approx(5.0 + 2.5 * 0.9 * 2.0).epsilon(1e-15));
  CHECK(step_pwa_ess(5.0, -2.0, a, tau) == doctest::Approx(5.0 - 2.5 * 2.0 / 1.1).epsilon(1e-15));
  // Both pieces meet at zero.
  CHECK(step_pwa_ess(5.0, 0.0, a, tau) == 5.0);
  CHECK_THROWS_AS(step_pwa_ess(std::nan(""), 0.0, a, tau), std::invalid_argument);
}

TEST_CASE("complementary inputs make the two storage forms agree for any efficiency") {
  AreaParams a;
  a.set_capacity(10.0);
  const double tau = 2.5;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double e = dist(rng);
    const bool charging = (trial % 2) == 0;
    const double p_c = charging ? dist(rng) : 0.0;
    const double p_d = charging ? 0.0 : dist(rng);
    const double linear_row = e + tau * (a.eta_c * p_c - p_d / a.eta_d);
    const double pwa = step_pwa_ess(e, p_c - p_d, a, tau);
    CHECK(pwa == doctest::Approx(linear_row).epsilon(1e-14));
  }
}

TEST_CASE("lossless storage agrees on every input pair; lossy storage does not") {
  AreaParams lossless;
  lossless.set_capacity(10.0);
  lossless.eta_c = 1.0;
  lossless.eta_d = 1.0;
  const double tau = 2.5;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double e = dist(rng);
    const double p_c = dist(rng);
    const double p_d = dist(rng);
    const double linear_row = e + tau * (p_c - p_d);
    CHECK(step_pwa_ess(e, p_c - p_d, lossless, tau) ==
          doctest::Approx(linear_row).epsilon(1e-14));
  }

  // With losses, simultaneous charge and discharge drive the forms apart:
  // the linear row burns energy while the net-zero piecewise update idles.
  AreaParams lossy;
  lossy.set_capacity(10.0);
  const double e = 5.0, both = 1.0;
  const double linear_row = e + tau * (lossy.eta_c * both - both / lossy.eta_d);
  const double pwa = step_pwa_ess(e, 0.0, lossy, tau);
  CHECK(pwa == e);
  CHECK(std::abs(linear_row - pwa) > 0.02);
}

TEST_CASE("turbine model guards and lag behavior") {
  const Topology topo = build_eea_topology();
  NetworkParams p = capacity_params(10.0);

  NetworkState x;
  x.turbine.emplace();
  CHECK_THROWS_AS(step_turbine(x, NetworkInput{}, ExogenousVec{}, topo, p, TurbineParams{}),
                  std::invalid_argument);  // tau = 2.5 is too coarse

  p.tau = 0.025;
  NetworkState no_states;
  CHECK_THROWS_AS(
      step_turbine(no_states, NetworkInput{}, ExogenousVec{}, topo, p, TurbineParams{}),
      std::invalid_argument);

  (*x.turbine)[0] = {1.0, 0.5, 0.25};
  NetworkInput cmd{};
  cmd[0] = {2.0, 0.0, 1.0};
  const TurbineParams tp;
  const NetworkState next = step_turbine(x, cmd, ExogenousVec{}, topo, p, tp);
  REQUIRE(next.turbine.has_value());

  const double decay = 1.0 - 0.025 / 2.5;
  const double gain = 0.025 * (1.0 / 2.5);
  CHECK((*next.turbine)[0].d_p_disp ==
        doctest::Approx(decay * 1.0 + gain * 2.0).epsilon(1e-14));
  CHECK((*next.turbine)[0].p_c == doctest::Approx(decay * 0.5).epsilon(1e-14));
  CHECK((*next.turbine)[0].p_d == doctest::Approx(decay * 0.25 + gain * 1.0).epsilon(1e-14));

  // The baseline rows consume the lag states, not the commands.
  const double expect_f = p.tau * (0.05 / 25.0) * (1.0 - 0.5 + 0.25);
  CHECK(next.areas[0].d_f == doctest::Approx(expect_f).epsilon(1e-13));
  const double expect_e = p.tau * (0.9 * 0.5 - 0.25 / 1.1);
  CHECK(next.areas[0].e == doctest::Approx(expect_e).epsilon(1e-13));
}

TEST_CASE("augmented model integrates production and tie flow") {
  const Topology topo = build_eea_topology();
  const NetworkParams p = capacity_params(10.0);

  CHECK_THROWS_AS(
      step_augmented(NetworkState{}, NetworkInput{}, ExogenousVec{}, topo, p),
      std::invalid_argument);

  NetworkState x;
  x.augmented.emplace();
  (*x.augmented)[0] = {7.0, 0.1};
  x.areas[0].d_delta = 1.0;
  NetworkInput u{};
  u[0].d_p_disp = 0.4;

  const NetworkState next = step_augmented(x, u, ExogenousVec{}, topo, p);
  REQUIRE(next.augmented.has_value());
  CHECK((*next.augmented)[0].p_disp == doctest::Approx(7.0 + 2.5 * 0.4).epsilon(1e-14));

  std::array<double, kAreaCount> angles{};
  angles[0] = 1.0;
  const double tie0 = tie_power(angles, topo)[0];
  CHECK((*next.augmented)[0].p_tie == doctest::Approx(0.1 + 2.5 * tie0).epsilon(1e-13));

  // Baseline rows are untouched by the augmentation.
  const NetworkState base = step_linear(x, u, ExogenousVec{}, topo, p);
  for (int i = 0; i < kAreaCount; ++i) {
    CHECK(next.areas[static_cast<std::size_t>(i)].d_f ==
          base.areas[static_cast<std::size_t>(i)].d_f);
    CHECK(next.areas[static_cast<std::size_t>(i)].d_delta ==
          base.areas[static_cast<std::size_t>(i)].d_delta);
  }
}

TEST_CASE("initial dispatch never schedules negative production") {
  CHECK(initial_dispatch(30.0, 12.0) == 18.0);
  CHECK(initial_dispatch(10.0, 25.0) == 0.0);
  CHECK_THROWS_AS(initial_dispatch(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("flatten round trips and rejects wrong sizes") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  NetworkState x;
  NetworkInput u;
  for (int i = 0; i < kAreaCount; ++i) {
    x.areas[static_cast<std::size_t>(i)] = {dist(rng), dist(rng), dist(rng)};
    u[static_cast<std::size_t>(i)] = {dist(rng), dist(rng), dist(rng)};
  }
  const NetworkState x2 = unflatten_state(flatten(x));
  const NetworkInput u2 = unflatten_input(flatten(u));
  for (int i = 0; i < kAreaCount; ++i) {
    CHECK(x2.areas[static_cast<std::size_t>(i)].d_delta ==
          x.areas[static_cast<std::size_t>(i)].d_delta);
    CHECK(x2.areas[static_cast<std::size_t>(i)].e == x.areas[static_cast<std::size_t>(i)].e);
    CHECK(u2[static_cast<std::size_t>(i)].p_d == u[static_cast<std::size_t>(i)].p_d);
  }
  const std::vector<double> wrong(5, 0.0);
  CHECK_THROWS_AS(unflatten_state(wrong), std::invalid_argument);
  CHECK_THROWS_AS(unflatten_input(wrong), std::invalid_argument);
}

TEST_CASE("non-finite inputs are rejected") {
  const Topology topo = build_eea_topology();
  const NetworkParams p = capacity_params(10.0);
  NetworkState x;
  x.areas[12].d_f = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step_linear(x, NetworkInput{}, ExogenousVec{}, topo, p),
                  std::invalid_argument);
}

}  // TEST_SUITE
