#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

// Core value types for a multi-vector (electricity + heat) energy system
// scheduled day-ahead in T discrete slots. Slot indices are 0-based
// everywhere in code; file formats use 1-based slot columns.

namespace mves {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Inclusive slot range during which a storage device is connected.
struct ServiceWindow {
  int first = 0;
  int last = 23;

  int length() const { return last - first + 1; }
  bool contains(int t) const { return t >= first && t <= last; }
};

// One storage fleet (EVs or thermal stores). Flow sign: positive =
// discharge into the system, negative = charge. The per-slot flow cap
// applies to the efficiency-weighted flow, so the signed flow itself
// lives in [-charge_eff*charge_max, +discharge_eff*discharge_max].
struct StorageParams {
  int count = 0;
  double charge_eff = 0.9;
  double discharge_eff = 0.9;
  double charge_max = 0.0;     // kWh per slot
  double discharge_max = 0.0;  // kWh per slot
  double soc_min = 0.0;        // kWh
  double soc_max = 0.0;        // kWh
  std::vector<ServiceWindow> window;  // one per device
  std::vector<double> soc_start;      // level entering the window, kWh

  double flow_lo() const { return -charge_eff * charge_max; }
  double flow_hi() const { return discharge_eff * discharge_max; }
};

struct SystemConfig {
  int slots = 24;  // T

  double transformer_eff = 0.980;
  double chp_elec_eff = 0.404;
  double chp_heat_eff = 0.566;
  double boiler_eff = 0.900;

  double grid_max = 1000.0;    // transformer import cap, kWh/slot
  double gas_max = 1200.0;     // gas import cap, kWh/slot
  double wind_max = 200.0;     // aggregate wind cap, kWh/slot
  double pv_max = 200.0;       // aggregate PV cap, kWh/slot
  double chp_gas_max = 300.0;  // gas routed to CHP, kWh/slot
  double boiler_gas_max = 800.0;

  StorageParams ev;
  StorageParams tes;

  // SOC bookkeeping: false = discharge lowers the stored level (physical),
  // true = signed flow is added to the level as printed in some references.
  bool soc_sign_literal = false;
};

// Per-slot day-ahead tariffs plus scalar settlement and reward rates, GBP/kWh.
struct PriceBook {
  Vec elec_da;  // length T
  Vec gas_da;   // length T
  double elec_rt_buy = 0.058;
  double elec_rt_sell = 0.025;
  double gas_rt_buy = 0.022;
  double gas_rt_sell = 0.011;
  double wind_reward = 0.02;
  double pv_reward = 0.02;
  double ev_reward = 0.03;
  double tes_reward = 0.01;
};

// One day of load and renewable series, kWh per slot. Wind and PV are
// aggregate (single channel each) and non-dispatchable.
struct DayProfile {
  Vec elec_load;
  Vec heat_load;
  Vec wind;
  Vec pv;
};

// Relative forecast errors per channel; actual = (1 + delta) * forecast.
struct ErrorSample {
  Vec elec;
  Vec heat;
  Vec wind;
  Vec pv;
};

// A day-ahead dispatch decision. chp_frac/boiler_frac split imported gas;
// their sum may not exceed 1. Storage rows are devices, columns slots.
struct Schedule {
  Vec grid_import;  // S_E
  Vec gas_import;   // S_G
  Vec chp_frac;     // v_CHP
  Vec boiler_frac;  // v_B
  Mat ev_flow;      // ev.count x T
  Mat tes_flow;     // tes.count x T

  static Schedule zero(const SystemConfig& c) {
    Schedule s;
    s.grid_import = Vec::Zero(c.slots);
    s.gas_import = Vec::Zero(c.slots);
    s.chp_frac = Vec::Zero(c.slots);
    s.boiler_frac = Vec::Zero(c.slots);
    s.ev_flow = Mat::Zero(c.ev.count, c.slots);
    s.tes_flow = Mat::Zero(c.tes.count, c.slots);
    return s;
  }
};

enum class ViolationKind {
  ElecBalance,
  HeatBalance,
  GridFlow,
  GasFlow,
  WindFlow,
  PvFlow,
  ChpFlow,
  BoilerFlow,
  DispatchSplit,
  EvFlow,
  TesFlow,
  EvWindowNet,
  TesWindowNet,
  EvSoc,
  TesSoc,
};

struct Violation {
  ViolationKind kind;
  int slot;           // -1 when the violation is not slot specific
  int device;         // -1 when no device is involved
  double magnitude;   // kWh by which the constraint is missed
};

const char* to_string(ViolationKind k);

// Per-slot cost decomposition of one settled day, GBP. all(t) is the
// scheduled cost plus both real-time correction terms; the SOC penalty is
// tracked separately and never folded into all().
struct CostLedger {
  Vec sched;       // day-ahead scheduling cost
  Vec extra_elec;  // real-time electricity correction
  Vec extra_gas;   // real-time gas correction
  Vec penalty;     // SOC excursion penalty, >= 0
  double adjustment = 0.0;  // cost delta introduced by pre-settlement repair

  double all(int t) const { return sched[t] + extra_elec[t] + extra_gas[t]; }
  double total_sched() const { return sched.sum(); }
  double total_extra() const { return extra_elec.sum() + extra_gas.sum(); }
  double total_penalty() const { return penalty.sum(); }
  double total_all() const { return total_sched() + total_extra(); }

  static CostLedger zero(int slots) {
    CostLedger l;
    l.sched = Vec::Zero(slots);
    l.extra_elec = Vec::Zero(slots);
    l.extra_gas = Vec::Zero(slots);
    l.penalty = Vec::Zero(slots);
    return l;
  }
};

// Thrown on malformed inputs: bad dimensions, broken invariants, bad files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate(const SystemConfig& c);
void validate(const SystemConfig& c, const DayProfile& p);
void validate(const SystemConfig& c, const ErrorSample& e);
void validate(const SystemConfig& c, const Schedule& s);
void validate(const SystemConfig& c, const PriceBook& p);

SystemConfig default_system();
SystemConfig large_system();  // 6 EVs, 4 TESs
PriceBook default_prices(int slots);

}  // namespace mves
