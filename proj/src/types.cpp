#include "mves/types.hpp"

namespace mves {

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::ElecBalance: return "elec_balance";
    case ViolationKind::HeatBalance: return "heat_balance";
    case ViolationKind::GridFlow: return "grid_flow";
    case ViolationKind::GasFlow: return "gas_flow";
    case ViolationKind::WindFlow: return "wind_flow";
    case ViolationKind::PvFlow: return "pv_flow";
    case ViolationKind::ChpFlow: return "chp_flow";
    case ViolationKind::BoilerFlow: return "boiler_flow";
    case ViolationKind::DispatchSplit: return "dispatch_split";
    case ViolationKind::EvFlow: return "ev_flow";
    case ViolationKind::TesFlow: return "tes_flow";
    case ViolationKind::EvWindowNet: return "ev_window_net";
    case ViolationKind::TesWindowNet: return "tes_window_net";
    case ViolationKind::EvSoc: return "ev_soc";
    case ViolationKind::TesSoc: return "tes_soc";
  }
  return "unknown";
}

namespace {

void validate_fleet(const StorageParams& sp, int slots, const char* label) {
  if (sp.count < 0) throw DataError(std::string(label) + ": negative device count");
  if (static_cast<int>(sp.window.size()) != sp.count)
    throw DataError(std::string(label) + ": window list size != count");
  if (static_cast<int>(sp.soc_start.size()) != sp.count)
    throw DataError(std::string(label) + ": soc_start size != count");
  if (sp.count == 0) return;
  if (sp.charge_eff <= 0 || sp.charge_eff > 1 || sp.discharge_eff <= 0 || sp.discharge_eff > 1)
    throw DataError(std::string(label) + ": efficiency outside (0,1]");
  if (sp.charge_max < 0 || sp.discharge_max < 0)
    throw DataError(std::string(label) + ": negative flow cap");
  if (sp.soc_min > sp.soc_max)
    throw DataError(std::string(label) + ": soc_min > soc_max");
  for (int k = 0; k < sp.count; ++k) {
    const ServiceWindow& w = sp.window[k];
    if (w.first < 0 || w.last >= slots || w.first > w.last)
      throw DataError(std::string(label) + ": bad service window for device " + std::to_string(k));
    if (sp.soc_start[k] < sp.soc_min || sp.soc_start[k] > sp.soc_max)
      throw DataError(std::string(label) + ": soc_start outside [soc_min, soc_max] for device " +
                      std::to_string(k));
  }
}

void check_len(const Vec& v, int slots, const char* what) {
  if (v.size() != slots)
    throw DataError(std::string(what) + ": length " + std::to_string(v.size()) +
                    ", expected " + std::to_string(slots));
}

}  // namespace

void validate(const SystemConfig& c) {
  if (c.slots <= 0) throw DataError("config: slots must be positive");
  auto eff = [](double e) { return e > 0 && e <= 1; };
  if (!eff(c.transformer_eff) || !eff(c.chp_elec_eff) || !eff(c.chp_heat_eff) ||
      !eff(c.boiler_eff))
    throw DataError("config: conversion efficiency outside (0,1]");
  if (c.grid_max < 0 || c.gas_max < 0 || c.wind_max < 0 || c.pv_max < 0 ||
      c.chp_gas_max < 0 || c.boiler_gas_max < 0)
    throw DataError("config: negative flow cap");
  validate_fleet(c.ev, c.slots, "ev");
  validate_fleet(c.tes, c.slots, "tes");
}

void validate(const SystemConfig& c, const DayProfile& p) {
  check_len(p.elec_load, c.slots, "elec_load");
  check_len(p.heat_load, c.slots, "heat_load");
  check_len(p.wind, c.slots, "wind");
  check_len(p.pv, c.slots, "pv");
  for (int t = 0; t < c.slots; ++t) {
    if (p.elec_load[t] < 0 || p.heat_load[t] < 0 || p.wind[t] < 0 || p.pv[t] < 0)
      throw DataError("profile: negative value at slot " + std::to_string(t + 1));
    if (!std::isfinite(p.elec_load[t]) || !std::isfinite(p.heat_load[t]) ||
        !std::isfinite(p.wind[t]) || !std::isfinite(p.pv[t]))
      throw DataError("profile: non-finite value at slot " + std::to_string(t + 1));
  }
}

void validate(const SystemConfig& c, const ErrorSample& e) {
  check_len(e.elec, c.slots, "delta_E");
  check_len(e.heat, c.slots, "delta_H");
  check_len(e.wind, c.slots, "delta_W");
  check_len(e.pv, c.slots, "delta_PV");
}

void validate(const SystemConfig& c, const Schedule& s) {
  check_len(s.grid_import, c.slots, "grid_import");
  check_len(s.gas_import, c.slots, "gas_import");
  check_len(s.chp_frac, c.slots, "chp_frac");
  check_len(s.boiler_frac, c.slots, "boiler_frac");
  if (s.ev_flow.rows() != c.ev.count || s.ev_flow.cols() != c.slots)
    throw DataError("schedule: ev_flow shape mismatch");
  if (s.tes_flow.rows() != c.tes.count || s.tes_flow.cols() != c.slots)
    throw DataError("schedule: tes_flow shape mismatch");
}

void validate(const SystemConfig& c, const PriceBook& p) {
  check_len(p.elec_da, c.slots, "elec_da");
  check_len(p.gas_da, c.slots, "gas_da");
}

SystemConfig default_system() {
  SystemConfig c;
  c.ev.count = 4;
  c.ev.charge_eff = 0.9;
  c.ev.discharge_eff = 0.9;
  c.ev.charge_max = 80.0;
  c.ev.discharge_max = 80.0;
  c.ev.soc_min = 40.0;
  c.ev.soc_max = 80.0;
  c.ev.window.assign(c.ev.count, ServiceWindow{0, c.slots - 1});
  c.ev.soc_start.assign(c.ev.count, 60.0);
  c.tes.count = 2;
  c.tes.charge_eff = 0.9;
  c.tes.discharge_eff = 0.9;
  c.tes.charge_max = 50.0;
  c.tes.discharge_max = 50.0;
  c.tes.soc_min = 40.0;
  c.tes.soc_max = 200.0;
  c.tes.window.assign(c.tes.count, ServiceWindow{0, c.slots - 1});
  c.tes.soc_start.assign(c.tes.count, 120.0);
  return c;
}

SystemConfig large_system() {
  SystemConfig c = default_system();
  c.ev.count = 6;
  c.ev.window.assign(c.ev.count, ServiceWindow{0, c.slots - 1});
  c.ev.soc_start.assign(c.ev.count, 60.0);
  c.tes.count = 4;
  c.tes.window.assign(c.tes.count, ServiceWindow{0, c.slots - 1});
  c.tes.soc_start.assign(c.tes.count, 120.0);
  return c;
}

PriceBook default_prices(int slots) {
  PriceBook p;
  p.elec_da = Vec::Constant(slots, 0.031);
  p.gas_da = Vec::Constant(slots, 0.013);
  return p;
}

}  // namespace mves
