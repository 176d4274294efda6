#include <stdexcept>
#include "lfc/model.hpp"

#include "doctest.h"

using namespace lfc;

TEST_SUITE("model") {

TEST_CASE("iso codes are unique and round-trip through area_index") {
  CHECK(kIsoCodes.size() == 26);
  for (int i = 0; i < kAreaCount; ++i) {
    const auto idx = area_index(kIsoCodes[static_cast<std::size_t>(i)]);
    REQUIRE(idx.has_value());
    CHECK(*idx == i);
  }
  CHECK(!area_index("XX").has_value());
  CHECK(!area_index("at").has_value());
  CHECK(!area_index("").has_value());
}

TEST_CASE("default parameter set") {
  const NetworkParams p = default_params();
  CHECK(p.tau == 2.5);
  CHECK(p.delta0 == 30.0);
  CHECK(p.f0 == 50.0);
  CHECK(p.steps_per_hour == 1440);
  for (const AreaParams& a : p.areas) {
    CHECK(a.t_p == 25.0);
    CHECK(a.k_p == 0.05);
    CHECK(a.eta_c == 0.9);
    CHECK(a.eta_d == 1.1);
    CHECK(a.p_disp_max == 0.0);
    CHECK(a.e_max == 0.0);
  }
}

TEST_CASE("set_capacity keeps storage and dispatch sizes tied") {
  AreaParams a;
  a.set_capacity(12.5);
  CHECK(a.p_disp_max == 12.5);
  CHECK(a.e_max == 12.5);
  CHECK_THROWS_AS(a.set_capacity(-1.0), std::invalid_argument);
}

TEST_CASE("constraint_set carries the hourly allocation rule") {
  AreaParams a;
  a.set_capacity(14.4);
  const ConstraintSet s = constraint_set(a);
  CHECK(s.d_delta.lo == -30.0);
  CHECK(s.d_delta.hi == 30.0);
  CHECK(s.d_f.lo == -0.04);
  CHECK(s.d_f.hi == 0.04);
  CHECK(s.e.lo == 0.0);
  CHECK(s.e.hi == 14.4);
  CHECK(s.d_p_disp.hi == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(s.d_p_disp.lo == -s.d_p_disp.hi);
  CHECK(s.p_c.lo == 0.0);
  CHECK(s.p_c.hi == s.d_p_disp.hi);
  CHECK(s.p_d.hi == s.d_p_disp.hi);
}

TEST_CASE("check_violations reports each box edge with its distance") {
  std::array<ConstraintSet, kAreaCount> sets;
  AreaParams a;
  a.set_capacity(1.44);  // input boxes at 0.001
  for (auto& s : sets) s = constraint_set(a);

  NetworkState x;
  NetworkInput u{};
  CHECK(check_violations(x, u, sets).empty());

  x.areas[3].d_f = 0.05;
  x.areas[7].e = -0.25;
  u[5].p_c = 0.0015;
  const ViolationReport rep = check_violations(x, u, sets);
  REQUIRE(rep.violations.size() == 3);

  CHECK(rep.violations[0].area == 3);
  CHECK(rep.violations[0].quantity == Quantity::d_f);
  CHECK(rep.violations[0].side == Side::upper);
  CHECK(rep.violations[0].amount == doctest::Approx(0.01).epsilon(1e-12));

  CHECK(rep.violations[1].area == 5);
  CHECK(rep.violations[1].quantity == Quantity::p_c);
  CHECK(rep.violations[1].side == Side::upper);

  CHECK(rep.violations[2].area == 7);
  CHECK(rep.violations[2].quantity == Quantity::e);
  CHECK(rep.violations[2].side == Side::lower);
  CHECK(rep.violations[2].amount == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("boundary values are not violations") {
  std::array<ConstraintSet, kAreaCount> sets;
  AreaParams a;
  a.set_capacity(1.44);
  for (auto& s : sets) s = constraint_set(a);
  NetworkState x;
  NetworkInput u{};
  x.areas[0].d_f = 0.04;
  x.areas[0].d_delta = -30.0;
  x.areas[0].e = 1.44;
  u[0].p_c = 0.001;
  CHECK(check_violations(x, u, sets).empty());
}

TEST_CASE("variant and quantity names round-trip") {
  for (ModelVariant v : {ModelVariant::linear, ModelVariant::pwa_ess, ModelVariant::turbine,
                         ModelVariant::augmented}) {
    const auto back = variant_from_string(to_string(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
  CHECK(!variant_from_string("nonlinear").has_value());
  CHECK(quantity_name(Quantity::d_f) == "d_f");
  CHECK(quantity_name(Quantity::p_disp_total) == "p_disp_total");
}

}  // TEST_SUITE
