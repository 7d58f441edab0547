#include "mves/day_ahead.hpp"

namespace mves {

DayAheadLayout day_ahead_layout(const SystemConfig& c) {
  return {c.slots, c.ev.count, c.tes.count};
}

std::vector<int> storage_sign_rota(const StorageParams& fleet, int device, int slots) {
  std::vector<int> rota(slots, 0);
  const ServiceWindow& w = fleet.window.at(device);
  const double soc0 = fleet.soc_start.at(device);
  const int phase = soc0 - fleet.soc_min >= fleet.soc_max - soc0 ? 1 : -1;
  for (int t = w.first; t <= w.last; ++t)
    rota[t] = (t - w.first) % 2 == 0 ? phase : -phase;
  return rota;
}

namespace {

std::string tag(const char* stem, int t) { return stem + std::string("_t") + std::to_string(t); }

std::string tag(const char* fleet, int k, const char* stem) {
  return fleet + std::to_string(k) + "_" + stem;
}

std::string tag(const char* fleet, int k, const char* stem, int t) {
  return tag(fleet, k, stem) + "_t" + std::to_string(t);
}

}  // namespace

LinearProgram build_day_ahead_lp(const SystemConfig& c, const DayProfile& forecast,
                                 const PriceBook& p) {
  validate(c, forecast);
  validate(c, p);
  const DayAheadLayout lay = day_ahead_layout(c);
  const int T = c.slots;

  LinearProgram lp;
  lp.vars.resize(lay.total());
  lp.objective = Vec::Zero(lay.total());

  for (int t = 0; t < T; ++t) {
    lp.vars[lay.grid(t)] = {tag("grid", t), 0.0, c.grid_max};
    lp.vars[lay.gas(t)] = {tag("gas", t), 0.0, c.gas_max};
    lp.vars[lay.chp_gas(t)] = {tag("chp", t), 0.0, c.chp_gas_max};
    lp.vars[lay.boiler_gas(t)] = {tag("boiler", t), 0.0, c.boiler_gas_max};
    lp.objective[lay.grid(t)] = p.elec_da[t];
    lp.objective[lay.gas(t)] = p.gas_da[t];
  }

  // storage columns: the rota pegs the closed side to a zero-width bound
  auto add_fleet = [&](const StorageParams& fleet, const char* name, double reward,
                       auto ch_col, auto dch_col) {
    const double sgn = c.soc_sign_literal ? 1.0 : -1.0;
    for (int k = 0; k < fleet.count; ++k) {
      const std::vector<int> rota = storage_sign_rota(fleet, k, T);
      for (int t = 0; t < T; ++t) {
        const double ch_cap = rota[t] == -1 ? fleet.charge_eff * fleet.charge_max : 0.0;
        const double dch_cap = rota[t] == 1 ? fleet.discharge_eff * fleet.discharge_max : 0.0;
        lp.vars[ch_col(t, k)] = {tag(name, k, "ch", t), 0.0, ch_cap};
        lp.vars[dch_col(t, k)] = {tag(name, k, "dch", t), 0.0, dch_cap};
        lp.objective[ch_col(t, k)] = -reward;
        lp.objective[dch_col(t, k)] = -reward;
      }

      const ServiceWindow& w = fleet.window[k];
      LinearRow net{tag(name, k, "net"), {}, 0.0};
      for (int t = w.first; t <= w.last; ++t) {
        net.terms.push_back({dch_col(t, k), 1.0});
        net.terms.push_back({ch_col(t, k), -1.0});
      }
      lp.eq_rows.push_back(std::move(net));

      // running level stays inside the corridor: soc = soc0 + sgn*cum(dch - ch)
      const double soc0 = fleet.soc_start[k];
      std::vector<std::pair<int, double>> hi, lo;
      for (int t = w.first; t <= w.last; ++t) {
        hi.push_back({dch_col(t, k), sgn});
        hi.push_back({ch_col(t, k), -sgn});
        lo.push_back({dch_col(t, k), -sgn});
        lo.push_back({ch_col(t, k), sgn});
        lp.le_rows.push_back({tag(name, k, "soc_hi", t), hi, fleet.soc_max - soc0});
        lp.le_rows.push_back({tag(name, k, "soc_lo", t), lo, soc0 - fleet.soc_min});
      }
    }
  };
  add_fleet(c.ev, "ev", p.ev_reward,
            [&](int t, int k) { return lay.ev_ch(t, k); },
            [&](int t, int k) { return lay.ev_dch(t, k); });
  add_fleet(c.tes, "tes", p.tes_reward,
            [&](int t, int k) { return lay.tes_ch(t, k); },
            [&](int t, int k) { return lay.tes_dch(t, k); });

  for (int t = 0; t < T; ++t) {
    LinearRow elec{tag("elec", t), {}, forecast.elec_load[t] - forecast.wind[t] - forecast.pv[t]};
    elec.terms.push_back({lay.grid(t), c.transformer_eff});
    elec.terms.push_back({lay.chp_gas(t), c.chp_elec_eff});
    for (int k = 0; k < c.ev.count; ++k) {
      elec.terms.push_back({lay.ev_dch(t, k), 1.0});
      elec.terms.push_back({lay.ev_ch(t, k), -1.0});
    }
    lp.eq_rows.push_back(std::move(elec));

    LinearRow heat{tag("heat", t), {}, forecast.heat_load[t]};
    heat.terms.push_back({lay.chp_gas(t), c.chp_heat_eff});
    heat.terms.push_back({lay.boiler_gas(t), c.boiler_eff});
    for (int k = 0; k < c.tes.count; ++k) {
      heat.terms.push_back({lay.tes_dch(t, k), 1.0});
      heat.terms.push_back({lay.tes_ch(t, k), -1.0});
    }
    lp.eq_rows.push_back(std::move(heat));

    lp.le_rows.push_back({tag("split", t),
                          {{lay.chp_gas(t), 1.0}, {lay.boiler_gas(t), 1.0}, {lay.gas(t), -1.0}},
                          0.0});
  }

  lp.objective_constant = 0.0;
  for (int t = 0; t < T; ++t)
    lp.objective_constant -= p.wind_reward * forecast.wind[t] + p.pv_reward * forecast.pv[t];
  return lp;
}

double churn_metric(const DayAheadLayout& lay, const Vec& x) {
  double worst = 0.0;
  for (int t = 0; t < lay.slots; ++t) {
    for (int k = 0; k < lay.k_ev; ++k)
      worst = std::max(worst, x[lay.ev_ch(t, k)] * x[lay.ev_dch(t, k)]);
    for (int k = 0; k < lay.k_tes; ++k)
      worst = std::max(worst, x[lay.tes_ch(t, k)] * x[lay.tes_dch(t, k)]);
  }
  return worst;
}

Schedule lp_solution_to_schedule(const SystemConfig& c, const SolveReport& rep) {
  if (rep.status != SolveStatus::Optimal)
    throw DataError(std::string("schedule recovery needs an optimal solve, got ") +
                    to_string(rep.status));
  const DayAheadLayout lay = day_ahead_layout(c);
  if (rep.solution.size() != lay.total())
    throw DataError("schedule recovery: solution length does not match the layout");

  Schedule s = Schedule::zero(c);
  const Vec& x = rep.solution;
  for (int t = 0; t < c.slots; ++t) {
    s.grid_import[t] = x[lay.grid(t)];
    s.gas_import[t] = x[lay.gas(t)];
    if (x[lay.gas(t)] > 1e-9) {
      s.chp_frac[t] = x[lay.chp_gas(t)] / x[lay.gas(t)];
      s.boiler_frac[t] = x[lay.boiler_gas(t)] / x[lay.gas(t)];
    }
    for (int k = 0; k < c.ev.count; ++k)
      s.ev_flow(k, t) = x[lay.ev_dch(t, k)] - x[lay.ev_ch(t, k)];
    for (int k = 0; k < c.tes.count; ++k)
      s.tes_flow(k, t) = x[lay.tes_dch(t, k)] - x[lay.tes_ch(t, k)];
  }
  return s;
}

InfeasibleError::InfeasibleError(std::vector<std::string> bad_rows)
    : std::runtime_error([&bad_rows] {
        std::string msg = "day-ahead program infeasible at:";
        const size_t shown = std::min<size_t>(bad_rows.size(), 8);
        for (size_t i = 0; i < shown; ++i) msg += " " + bad_rows[i];
        if (bad_rows.size() > shown)
          msg += " (+" + std::to_string(bad_rows.size() - shown) + " more)";
        return msg;
      }()),
      rows(std::move(bad_rows)) {}

DayAheadResult benchmark_schedule(const SystemConfig& c, const DayProfile& forecast,
                                  const PriceBook& p) {
  const LinearProgram lp = build_day_ahead_lp(c, forecast, p);
  SolveReport rep = solve(lp);
  if (rep.status == SolveStatus::Infeasible) throw InfeasibleError(std::move(rep.infeasible_rows));
  if (rep.status != SolveStatus::Optimal)
    throw DataError(std::string("day-ahead solve ended with ") + to_string(rep.status));

  DayAheadResult out;
  out.schedule = lp_solution_to_schedule(c, rep);
  out.objective = rep.objective;
  out.iterations = rep.iterations;
  out.churn = churn_metric(day_ahead_layout(c), rep.solution);
  return out;
}

}  // namespace mves
