#include "mves/costs.hpp"

#include "mves/feasibility.hpp"

namespace mves {

double scheduling_cost(const SystemConfig& c, const Schedule& s, const DayProfile& profile,
                       const PriceBook& p, int t) {
  (void)c;
  double cost = p.elec_da[t] * s.grid_import[t] + p.gas_da[t] * s.gas_import[t];
  cost -= p.ev_reward * s.ev_flow.col(t).cwiseAbs().sum();
  cost -= p.tes_reward * s.tes_flow.col(t).cwiseAbs().sum();
  cost -= p.wind_reward * profile.wind[t] + p.pv_reward * profile.pv[t];
  return cost;
}

std::pair<double, double> mismatch(const SystemConfig& c, const Schedule& s,
                                   const DayProfile& actual, int t) {
  const double supply_e = c.transformer_eff * s.grid_import[t] +
                          s.chp_frac[t] * c.chp_elec_eff * s.gas_import[t] + actual.wind[t] +
                          actual.pv[t] + s.ev_flow.col(t).sum();
  const double d_elec = (actual.elec_load[t] - supply_e) / c.transformer_eff;

  const double supply_h = s.chp_frac[t] * c.chp_heat_eff * s.gas_import[t] +
                          s.boiler_frac[t] * c.boiler_eff * s.gas_import[t] +
                          s.tes_flow.col(t).sum();
  const double d_gas = (actual.heat_load[t] - supply_h) / c.boiler_eff;
  return {d_elec, d_gas};
}

std::pair<double, double> extra_cost(const PriceBook& p, double d_elec, double d_gas, int t) {
  const double ce = d_elec >= 0 ? p.elec_rt_buy * d_elec : (p.elec_da[t] - p.elec_rt_sell) * d_elec;
  const double cg = d_gas >= 0 ? p.gas_rt_buy * d_gas : (p.gas_da[t] - p.gas_rt_sell) * d_gas;
  return {ce, cg};
}

namespace {

void fleet_penalty(const SystemConfig& c, const StorageParams& sp, const Mat& flow, Vec& out) {
  for (int k = 0; k < sp.count; ++k) {
    const ServiceWindow& w = sp.window[k];
    const Vec soc = soc_trajectory(c, flow.row(k).segment(w.first, w.length()), w, sp.soc_start[k]);
    for (int i = 0; i < w.length(); ++i) {
      const double excursion = std::max({sp.soc_min - soc[i], soc[i] - sp.soc_max, 0.0});
      out[w.first + i] += excursion;
    }
  }
}

}  // namespace

Vec penalty_series(const SystemConfig& c, const Schedule& s) {
  Vec out = Vec::Zero(c.slots);
  fleet_penalty(c, c.ev, s.ev_flow, out);
  fleet_penalty(c, c.tes, s.tes_flow, out);
  return out;
}

double penalty_cost(const SystemConfig& c, const Schedule& s, int t) {
  return penalty_series(c, s)[t];
}

CostLedger total_cost_day(const SystemConfig& c, const Schedule& s, const DayProfile& forecast,
                          const DayProfile& actual, const PriceBook& p) {
  validate(c);
  validate(c, forecast);
  validate(c, actual);
  validate(c, s);
  validate(c, p);
  CostLedger ledger = CostLedger::zero(c.slots);
  for (int t = 0; t < c.slots; ++t) {
    ledger.sched[t] = scheduling_cost(c, s, actual, p, t);
    const auto [de, dg] = mismatch(c, s, actual, t);
    const auto [ce, cg] = extra_cost(p, de, dg, t);
    ledger.extra_elec[t] = ce;
    ledger.extra_gas[t] = cg;
  }
  ledger.penalty = penalty_series(c, s);
  return ledger;
}

ScheduleGrad ScheduleGrad::zero(const SystemConfig& c) {
  ScheduleGrad g;
  g.grid_import = Vec::Zero(c.slots);
  g.gas_import = Vec::Zero(c.slots);
  g.chp_frac = Vec::Zero(c.slots);
  g.boiler_frac = Vec::Zero(c.slots);
  g.ev_flow = Mat::Zero(c.ev.count, c.slots);
  g.tes_flow = Mat::Zero(c.tes.count, c.slots);
  return g;
}

void ScheduleGrad::scale(double f) {
  grid_import *= f;
  gas_import *= f;
  chp_frac *= f;
  boiler_frac *= f;
  ev_flow *= f;
  tes_flow *= f;
}

void ScheduleGrad::add(const ScheduleGrad& o) {
  grid_import += o.grid_import;
  gas_import += o.gas_import;
  chp_frac += o.chp_frac;
  boiler_frac += o.boiler_frac;
  ev_flow += o.ev_flow;
  tes_flow += o.tes_flow;
}

namespace {

double sgn0(double x) { return x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0; }

// corridor excursion derivative wrt the stored level; deficit branch wins ties
void fleet_penalty_grad(const SystemConfig& c, const StorageParams& sp, const Mat& flow,
                        double lambda, Mat& grad) {
  const double sign = c.soc_sign_literal ? 1.0 : -1.0;
  for (int k = 0; k < sp.count; ++k) {
    const ServiceWindow& w = sp.window[k];
    const int n = w.length();
    const Vec soc = soc_trajectory(c, flow.row(k).segment(w.first, n), w, sp.soc_start[k]);
    Vec dsoc(n);
    for (int i = 0; i < n; ++i) {
      const double deficit = sp.soc_min - soc[i];
      const double surplus = soc[i] - sp.soc_max;
      if (deficit >= surplus && deficit >= 0.0)
        dsoc[i] = -1.0;
      else if (surplus >= 0.0)
        dsoc[i] = 1.0;
      else
        dsoc[i] = 0.0;
    }
    // d soc[i] / d flow[j] = sign for j <= i, so accumulate a suffix sum
    double suffix = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      suffix += dsoc[i];
      grad(k, w.first + i) += lambda * sign * suffix;
    }
  }
}

}  // namespace

ScheduleGrad settlement_gradient(const SystemConfig& c, const Schedule& s,
                                 const DayProfile& actual, const PriceBook& p,
                                 double lambda) {
  ScheduleGrad g = ScheduleGrad::zero(c);
  for (int t = 0; t < c.slots; ++t) {
    const auto [de, dg] = mismatch(c, s, actual, t);
    const double coef_e = de >= 0 ? p.elec_rt_buy : p.elec_da[t] - p.elec_rt_sell;
    const double coef_g = dg >= 0 ? p.gas_rt_buy : p.gas_da[t] - p.gas_rt_sell;
    const double vc = s.chp_frac[t];
    const double vb = s.boiler_frac[t];
    const double sg = s.gas_import[t];

    g.grid_import[t] = p.elec_da[t] - coef_e;
    g.gas_import[t] = p.gas_da[t] - coef_e * vc * c.chp_elec_eff / c.transformer_eff -
                      coef_g * (vc * c.chp_heat_eff + vb * c.boiler_eff) / c.boiler_eff;
    g.chp_frac[t] = -coef_e * c.chp_elec_eff * sg / c.transformer_eff -
                    coef_g * c.chp_heat_eff * sg / c.boiler_eff;
    g.boiler_frac[t] = -coef_g * sg;
    for (int k = 0; k < c.ev.count; ++k)
      g.ev_flow(k, t) = -p.ev_reward * sgn0(s.ev_flow(k, t)) - coef_e / c.transformer_eff;
    for (int k = 0; k < c.tes.count; ++k)
      g.tes_flow(k, t) = -p.tes_reward * sgn0(s.tes_flow(k, t)) - coef_g / c.boiler_eff;
  }
  if (lambda != 0.0) {
    fleet_penalty_grad(c, c.ev, s.ev_flow, lambda, g.ev_flow);
    fleet_penalty_grad(c, c.tes, s.tes_flow, lambda, g.tes_flow);
  }
  return g;
}

}  // namespace mves
