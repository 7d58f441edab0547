#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mves/costs.hpp"
#include "mves/feasibility.hpp"
#include "mves/rng.hpp"

using namespace mves;

namespace {

SystemConfig bare_config(int slots) {
  SystemConfig c;
  c.slots = slots;
  return c;  // no storage devices
}

DayProfile zero_profile(int slots) {
  DayProfile p;
  p.elec_load = Vec::Zero(slots);
  p.heat_load = Vec::Zero(slots);
  p.wind = Vec::Zero(slots);
  p.pv = Vec::Zero(slots);
  return p;
}

SystemConfig one_ev_config(int slots, double soc_start) {
  SystemConfig c = bare_config(slots);
  c.ev.count = 1;
  c.ev.charge_max = 80;
  c.ev.discharge_max = 80;
  c.ev.soc_min = 40;
  c.ev.soc_max = 80;
  c.ev.window = {ServiceWindow{0, slots - 1}};
  c.ev.soc_start = {soc_start};
  return c;
}

}  // namespace

TEST_CASE("soc trajectory walks the window") {
  SystemConfig c = bare_config(3);
  ServiceWindow w{0, 2};
  Vec flows(3);
  flows << 20, 20, -40;
  Vec soc = soc_trajectory(c, flows, w, 80.0);
  CHECK(soc[0] == doctest::Approx(60.0));
  CHECK(soc[1] == doctest::Approx(40.0));
  CHECK(soc[2] == doctest::Approx(80.0));

  Vec two(2);
  two << -10, 10;
  ServiceWindow w2{0, 1};
  Vec soc2 = soc_trajectory(c, two, w2, 60.0);
  CHECK(soc2[0] == doctest::Approx(70.0));
  CHECK(soc2[1] == doctest::Approx(60.0));

  c.soc_sign_literal = true;
  Vec soc3 = soc_trajectory(c, two, w2, 60.0);
  CHECK(soc3[0] == doctest::Approx(50.0));
  CHECK(soc3[1] == doctest::Approx(60.0));

  CHECK_THROWS_AS(soc_trajectory(c, flows, w2, 60.0), DataError);
}

TEST_CASE("soc trajectory telescopes") {
  SystemConfig c = bare_config(8);
  Rng rng(11);
  ServiceWindow w{0, 7};
  Vec flows(8);
  for (int i = 0; i < 8; ++i) flows[i] = rng.uniform(-30, 30);
  Vec soc = soc_trajectory(c, flows, w, 55.0);
  CHECK(soc[7] == doctest::Approx(55.0 - flows.sum()).epsilon(1e-12));
}

TEST_CASE("feasibility accepts the zero system") {
  SystemConfig c = default_system();
  CHECK(check_feasibility(c, zero_profile(c.slots), Schedule::zero(c)).empty());
}

TEST_CASE("feasibility flags a grid overdraw exactly once") {
  SystemConfig c = bare_config(24);
  DayProfile p = zero_profile(24);
  Schedule s = Schedule::zero(c);
  s.grid_import[5] = 1100.0;
  p.elec_load[5] = 0.98 * 1100.0;  // keep the balance satisfied
  auto v = check_feasibility(c, p, s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::GridFlow);
  CHECK(v[0].slot == 5);
  CHECK(v[0].magnitude == doctest::Approx(100.0));
}

TEST_CASE("feasibility flags an soc dip exactly once") {
  SystemConfig c = one_ev_config(2, 40.0);
  DayProfile p = zero_profile(2);
  Schedule s = Schedule::zero(c);
  s.ev_flow(0, 0) = 10.0;   // discharge below the floor
  s.ev_flow(0, 1) = -10.0;  // restore, keeping window net zero
  p.elec_load[0] = 10.0;
  s.grid_import[1] = 10.0 / 0.98;  // grid covers the recharge
  auto v = check_feasibility(c, p, s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::EvSoc);
  CHECK(v[0].slot == 0);
  CHECK(v[0].device == 0);
  CHECK(v[0].magnitude == doctest::Approx(10.0));
}

TEST_CASE("feasibility violation set shrinks as tol grows") {
  SystemConfig c = default_system();
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    DayProfile p = zero_profile(c.slots);
    Schedule s = Schedule::zero(c);
    for (int t = 0; t < c.slots; ++t) {
      p.elec_load[t] = rng.uniform(0, 400);
      p.heat_load[t] = rng.uniform(0, 300);
      s.grid_import[t] = rng.uniform(-50, 1100);
      s.gas_import[t] = rng.uniform(0, 1300);
      s.chp_frac[t] = rng.uniform(0, 0.8);
      s.boiler_frac[t] = rng.uniform(0, 0.8);
      for (int k = 0; k < c.ev.count; ++k) s.ev_flow(k, t) = rng.uniform(-90, 90);
      for (int k = 0; k < c.tes.count; ++k) s.tes_flow(k, t) = rng.uniform(-60, 60);
    }
    auto tight = check_feasibility(c, p, s, 1e-9);
    auto loose = check_feasibility(c, p, s, 1e-2);
    auto key = [](const Violation& v) {
      return std::tuple<int, int, int>(static_cast<int>(v.kind), v.slot, v.device);
    };
    std::vector<std::tuple<int, int, int>> tk, lk;
    for (auto& v : tight) tk.push_back(key(v));
    for (auto& v : loose) lk.push_back(key(v));
    for (auto& k : lk) CHECK(std::count(tk.begin(), tk.end(), k) > 0);
    CHECK(loose.size() <= tight.size());
  }
}

TEST_CASE("feasibility rejects mismatched shapes") {
  SystemConfig c = default_system();
  Schedule s = Schedule::zero(c);
  s.grid_import = Vec::Zero(c.slots - 1);
  CHECK_THROWS_AS(check_feasibility(c, zero_profile(c.slots), s), DataError);
}

TEST_CASE("scheduling cost worked values") {
  SystemConfig c = bare_config(1);
  c.ev = default_system().ev;
  c.ev.window = {ServiceWindow{0, 0}, ServiceWindow{0, 0}, ServiceWindow{0, 0},
                 ServiceWindow{0, 0}};
  PriceBook p = default_prices(1);
  DayProfile prof = zero_profile(1);
  Schedule s = Schedule::zero(c);

  CHECK(scheduling_cost(c, s, prof, p, 0) == doctest::Approx(0.0));

  s.grid_import[0] = 100.0;
  CHECK(scheduling_cost(c, s, prof, p, 0) == doctest::Approx(3.1));

  s.grid_import[0] = 0.0;
  s.ev_flow(0, 0) = -20.0;
  CHECK(scheduling_cost(c, s, prof, p, 0) == doctest::Approx(-0.6));

  s.ev_flow(0, 0) = 0.0;
  prof.wind[0] = 50.0;
  prof.pv[0] = 30.0;
  CHECK(scheduling_cost(c, s, prof, p, 0) == doctest::Approx(-1.6));
}

TEST_CASE("mismatch worked values") {
  SystemConfig c = bare_config(1);
  DayProfile actual = zero_profile(1);
  Schedule s = Schedule::zero(c);

  auto [z_e, z_g] = mismatch(c, s, actual, 0);
  CHECK(z_e == doctest::Approx(0.0));
  CHECK(z_g == doctest::Approx(0.0));

  actual.elec_load[0] = 98.0;
  auto [d_e, d_g] = mismatch(c, s, actual, 0);
  CHECK(d_e == doctest::Approx(100.0));
  CHECK(d_g == doctest::Approx(0.0));

  // boiler meets the heat exactly: no gas-side imbalance
  actual.heat_load[0] = 81.0;
  s.gas_import[0] = 90.0;
  s.boiler_frac[0] = 1.0;
  auto [e2, g2] = mismatch(c, s, actual, 0);
  CHECK(e2 == doctest::Approx(100.0));
  CHECK(g2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mismatch is affine in the schedule") {
  SystemConfig c = default_system();
  Rng rng(3);
  DayProfile actual = zero_profile(c.slots);
  for (int t = 0; t < c.slots; ++t) actual.elec_load[t] = rng.uniform(0, 500);
  Schedule a = Schedule::zero(c);
  Schedule b = Schedule::zero(c);
  for (int t = 0; t < c.slots; ++t) {
    a.grid_import[t] = rng.uniform(0, 500);
    b.grid_import[t] = rng.uniform(0, 500);
  }
  // same chp_frac keeps the map affine; midpoint imbalance is the mean
  Schedule mid = Schedule::zero(c);
  mid.grid_import = 0.5 * (a.grid_import + b.grid_import);
  auto [ma, _a] = mismatch(c, a, actual, 3);
  auto [mb, _b] = mismatch(c, b, actual, 3);
  auto [mm, _m] = mismatch(c, mid, actual, 3);
  CHECK(mm == doctest::Approx(0.5 * (ma + mb)).epsilon(1e-12));
}

TEST_CASE("extra cost branches") {
  PriceBook p = default_prices(1);
  auto [a, b] = extra_cost(p, 0.0, 0.0, 0);
  CHECK(a == doctest::Approx(0.0));
  CHECK(b == doctest::Approx(0.0));
  CHECK(extra_cost(p, 100.0, 0.0, 0).first == doctest::Approx(5.8));
  CHECK(extra_cost(p, -100.0, 0.0, 0).first == doctest::Approx(-0.6));
  CHECK(extra_cost(p, 0.0, 100.0, 0).second == doctest::Approx(2.2));
  CHECK(extra_cost(p, 0.0, -100.0, 0).second == doctest::Approx(-0.2));
}

TEST_CASE("extra cost is continuous at zero imbalance") {
  PriceBook p = default_prices(1);
  const double eps = 1e-9;
  CHECK(std::abs(extra_cost(p, eps, 0, 0).first - extra_cost(p, -eps, 0, 0).first) < 1e-7);
}

TEST_CASE("penalty measures corridor excursions") {
  SystemConfig c = one_ev_config(2, 60.0);
  Schedule s = Schedule::zero(c);
  CHECK(penalty_cost(c, s, 0) == doctest::Approx(0.0));
  s.ev_flow(0, 0) = 30.0;  // level drops to 30, floor is 40
  s.ev_flow(0, 1) = -30.0;
  CHECK(penalty_cost(c, s, 0) == doctest::Approx(10.0));
  CHECK(penalty_cost(c, s, 1) == doctest::Approx(0.0));
  s.ev_flow(0, 0) = -30.0;  // level rises to 90, cap is 80
  s.ev_flow(0, 1) = 30.0;
  CHECK(penalty_cost(c, s, 0) == doctest::Approx(10.0));
}

TEST_CASE("day settlement worked example") {
  SystemConfig c = bare_config(1);
  PriceBook p = default_prices(1);
  DayProfile forecast = zero_profile(1);
  forecast.elec_load[0] = 98.0;
  DayProfile actual = forecast;
  actual.elec_load[0] = 107.8;
  Schedule s = Schedule::zero(c);
  s.grid_import[0] = 100.0;

  CostLedger l = total_cost_day(c, s, forecast, actual, p);
  CHECK(l.sched[0] == doctest::Approx(3.1));
  CHECK(l.extra_elec[0] == doctest::Approx(0.58));
  CHECK(l.extra_gas[0] == doctest::Approx(0.0));
  CHECK(l.total_all() == doctest::Approx(3.68));
  CHECK(l.all(0) == l.sched[0] + l.extra_elec[0] + l.extra_gas[0]);
}

TEST_CASE("settling a feasible day against its own forecast has no extra cost") {
  SystemConfig c = bare_config(2);
  PriceBook p = default_prices(2);
  DayProfile f = zero_profile(2);
  Schedule s = Schedule::zero(c);
  s.grid_import << 120.0, 80.0;
  s.gas_import << 90.0, 50.0;
  s.boiler_frac << 1.0, 0.5;
  s.chp_frac << 0.0, 0.5;
  for (int t = 0; t < 2; ++t) {
    f.elec_load[t] =
        0.98 * s.grid_import[t] + s.chp_frac[t] * 0.404 * s.gas_import[t];
    f.heat_load[t] = s.chp_frac[t] * 0.566 * s.gas_import[t] +
                     s.boiler_frac[t] * 0.9 * s.gas_import[t];
  }
  REQUIRE(check_feasibility(c, f, s).empty());
  CostLedger l = total_cost_day(c, s, f, f, p);
  CHECK(l.total_extra() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(l.total_penalty() == doctest::Approx(0.0));
}

TEST_CASE("settlement gradient matches finite differences away from kinks") {
  SystemConfig c = default_system();
  c.slots = 6;
  for (auto& w : c.ev.window) w = ServiceWindow{0, 5};
  for (auto& w : c.tes.window) w = ServiceWindow{0, 5};
  PriceBook p = default_prices(c.slots);
  Rng rng(21);
  DayProfile actual = zero_profile(c.slots);
  for (int t = 0; t < c.slots; ++t) {
    actual.elec_load[t] = rng.uniform(100, 500);
    actual.heat_load[t] = rng.uniform(50, 300);
    actual.wind[t] = rng.uniform(0, 100);
    actual.pv[t] = rng.uniform(0, 100);
  }
  Schedule s = Schedule::zero(c);
  for (int t = 0; t < c.slots; ++t) {
    s.grid_import[t] = rng.uniform(10, 400);
    s.gas_import[t] = rng.uniform(10, 400);
    s.chp_frac[t] = rng.uniform(0.1, 0.4);
    s.boiler_frac[t] = rng.uniform(0.1, 0.4);
    for (int k = 0; k < c.ev.count; ++k)
      s.ev_flow(k, t) = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(5, 40);
    for (int k = 0; k < c.tes.count; ++k)
      s.tes_flow(k, t) = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(5, 30);
  }
  const double lambda = 1.0;
  auto eval = [&](const Schedule& sc) {
    CostLedger l = total_cost_day(c, sc, actual, actual, p);
    return l.total_all() + lambda * l.total_penalty();
  };
  ScheduleGrad g = settlement_gradient(c, s, actual, p, lambda);

  auto probe = [&](double* slot_value, double analytic) {
    const double h = 1e-6 * std::max(1.0, std::abs(*slot_value));
    const double saved = *slot_value;
    *slot_value = saved + h;
    const double up = eval(s);
    *slot_value = saved - h;
    const double dn = eval(s);
    *slot_value = saved;
    const double fd = (up - dn) / (2 * h);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
  };
  for (int t = 0; t < c.slots; ++t) {
    probe(&s.grid_import[t], g.grid_import[t]);
    probe(&s.gas_import[t], g.gas_import[t]);
    probe(&s.chp_frac[t], g.chp_frac[t]);
    probe(&s.boiler_frac[t], g.boiler_frac[t]);
    probe(&s.ev_flow(0, t), g.ev_flow(0, t));
    probe(&s.tes_flow(1, t), g.tes_flow(1, t));
  }
}
