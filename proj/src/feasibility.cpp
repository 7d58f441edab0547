#include "mves/feasibility.hpp"

namespace mves {

Vec soc_trajectory(const SystemConfig& c, const Eigen::Ref<const Vec>& flows,
                   const ServiceWindow& w, double soc_start) {
  if (flows.size() != w.length())
    throw DataError("soc_trajectory: flow count " + std::to_string(flows.size()) +
                    " != window length " + std::to_string(w.length()));
  Vec soc(w.length());
  const double sign = c.soc_sign_literal ? 1.0 : -1.0;
  double level = soc_start;
  for (int i = 0; i < w.length(); ++i) {
    level += sign * flows[i];
    soc[i] = level;
  }
  return soc;
}

namespace {

struct Checker {
  std::vector<Violation>& out;
  double tol;

  // value must not exceed hi; slack scales with the bound size
  void above(ViolationKind kind, int slot, int dev, double value, double hi) {
    const double slack = tol * std::max(1.0, std::abs(hi));
    if (value > hi + slack) out.push_back({kind, slot, dev, value - hi});
  }
  void below(ViolationKind kind, int slot, int dev, double value, double lo) {
    const double slack = tol * std::max(1.0, std::abs(lo));
    if (value < lo - slack) out.push_back({kind, slot, dev, lo - value});
  }
  void equal(ViolationKind kind, int slot, double value, double target) {
    const double slack = tol * std::max(1.0, std::abs(target));
    if (std::abs(value - target) > slack)
      out.push_back({kind, slot, -1, std::abs(value - target)});
  }
};

void check_fleet(const SystemConfig& c, const StorageParams& sp, const Mat& flow,
                 ViolationKind kind_flow, ViolationKind kind_net, ViolationKind kind_soc,
                 Checker& ck, std::vector<Violation>& out) {
  for (int k = 0; k < sp.count; ++k) {
    const ServiceWindow& w = sp.window[k];
    for (int t = 0; t < c.slots; ++t) {
      const double f = flow(k, t);
      if (!w.contains(t)) {
        // parked devices cannot exchange energy
        if (std::abs(f) > ck.tol) out.push_back({kind_flow, t, k, std::abs(f)});
        continue;
      }
      ck.above(kind_flow, t, k, f, sp.flow_hi());
      ck.below(kind_flow, t, k, f, sp.flow_lo());
    }
    const Vec in_window = flow.row(k).segment(w.first, w.length());
    const double net = in_window.sum();
    const double net_slack = ck.tol * std::max(1.0, in_window.cwiseAbs().sum());
    if (std::abs(net) > net_slack) out.push_back({kind_net, -1, k, std::abs(net)});
    const Vec soc = soc_trajectory(c, in_window, w, sp.soc_start[k]);
    for (int i = 0; i < w.length(); ++i) {
      ck.above(kind_soc, w.first + i, k, soc[i], sp.soc_max);
      ck.below(kind_soc, w.first + i, k, soc[i], sp.soc_min);
    }
  }
}

}  // namespace

std::vector<Violation> check_feasibility(const SystemConfig& c, const DayProfile& forecast,
                                         const Schedule& s, double tol) {
  validate(c);
  validate(c, forecast);
  validate(c, s);
  std::vector<Violation> out;
  Checker ck{out, tol};

  for (int t = 0; t < c.slots; ++t) {
    const double se = s.grid_import[t];
    const double sg = s.gas_import[t];
    const double vc = s.chp_frac[t];
    const double vb = s.boiler_frac[t];

    const double elec_supply = c.transformer_eff * se + vc * c.chp_elec_eff * sg +
                               forecast.wind[t] + forecast.pv[t] + s.ev_flow.col(t).sum();
    ck.equal(ViolationKind::ElecBalance, t, elec_supply, forecast.elec_load[t]);

    const double heat_supply =
        vc * c.chp_heat_eff * sg + vb * c.boiler_eff * sg + s.tes_flow.col(t).sum();
    ck.equal(ViolationKind::HeatBalance, t, heat_supply, forecast.heat_load[t]);

    ck.below(ViolationKind::GridFlow, t, -1, se, 0.0);
    ck.above(ViolationKind::GridFlow, t, -1, se, c.grid_max);
    ck.below(ViolationKind::GasFlow, t, -1, sg, 0.0);
    ck.above(ViolationKind::GasFlow, t, -1, sg, c.gas_max);
    ck.below(ViolationKind::WindFlow, t, -1, forecast.wind[t], 0.0);
    ck.above(ViolationKind::WindFlow, t, -1, forecast.wind[t], c.wind_max);
    ck.below(ViolationKind::PvFlow, t, -1, forecast.pv[t], 0.0);
    ck.above(ViolationKind::PvFlow, t, -1, forecast.pv[t], c.pv_max);
    ck.below(ViolationKind::ChpFlow, t, -1, vc * sg, 0.0);
    ck.above(ViolationKind::ChpFlow, t, -1, vc * sg, c.chp_gas_max);
    ck.below(ViolationKind::BoilerFlow, t, -1, vb * sg, 0.0);
    ck.above(ViolationKind::BoilerFlow, t, -1, vb * sg, c.boiler_gas_max);
    ck.below(ViolationKind::DispatchSplit, t, -1, vc, 0.0);
    ck.below(ViolationKind::DispatchSplit, t, -1, vb, 0.0);
    ck.above(ViolationKind::DispatchSplit, t, -1, vc + vb, 1.0);
  }

  check_fleet(c, c.ev, s.ev_flow, ViolationKind::EvFlow, ViolationKind::EvWindowNet,
              ViolationKind::EvSoc, ck, out);
  check_fleet(c, c.tes, s.tes_flow, ViolationKind::TesFlow, ViolationKind::TesWindowNet,
              ViolationKind::TesSoc, ck, out);
  return out;
}

}  // namespace mves
