#pragma once

#include <string>
#include <vector>

#include "mves/lp.hpp"
#include "mves/types.hpp"

namespace mves {

// Slot-major variable layout for the day-ahead program. Per slot:
// [grid, gas, chp_gas, boiler_gas, (ev_ch, ev_dch) x K_EV, (tes_ch, tes_dch) x K_TES].
// chp_gas and boiler_gas replace the bilinear dispatch products; the fractions
// are recovered afterwards by division.
struct DayAheadLayout {
  int slots = 0;
  int k_ev = 0;
  int k_tes = 0;

  int per_slot() const { return 4 + 2 * k_ev + 2 * k_tes; }
  int total() const { return slots * per_slot(); }
  int grid(int t) const { return t * per_slot(); }
  int gas(int t) const { return t * per_slot() + 1; }
  int chp_gas(int t) const { return t * per_slot() + 2; }
  int boiler_gas(int t) const { return t * per_slot() + 3; }
  int ev_ch(int t, int k) const { return t * per_slot() + 4 + 2 * k; }
  int ev_dch(int t, int k) const { return t * per_slot() + 4 + 2 * k + 1; }
  int tes_ch(int t, int k) const { return t * per_slot() + 4 + 2 * k_ev + 2 * k; }
  int tes_dch(int t, int k) const { return t * per_slot() + 4 + 2 * k_ev + 2 * k + 1; }
};

DayAheadLayout day_ahead_layout(const SystemConfig& c);

// Per-slot storage direction plan: +1 discharge side open, -1 charge side open,
// 0 outside the service window. In-window slots alternate so a device can never
// charge and discharge at once, which keeps the usage reward -C*(u_ch + u_dch)
// equal to -C*|flow| and the program objective equal to the settled day cost.
// The opening direction favors the side with more stored headroom.
std::vector<int> storage_sign_rota(const StorageParams& fleet, int device, int slots);

LinearProgram build_day_ahead_lp(const SystemConfig& c, const DayProfile& forecast,
                                 const PriceBook& p);

// Largest per-slot u_ch*u_dch product over all devices. Zero under the rota;
// reported, never asserted.
double churn_metric(const DayAheadLayout& layout, const Vec& x);

Schedule lp_solution_to_schedule(const SystemConfig& c, const SolveReport& rep);

struct InfeasibleError : std::runtime_error {
  std::vector<std::string> rows;
  explicit InfeasibleError(std::vector<std::string> bad_rows);
};

struct DayAheadResult {
  Schedule schedule;
  double objective = 0.0;
  int iterations = 0;
  double churn = 0.0;
};

// Deterministic scheduler that trusts the forecast: builds the program above,
// solves it, recovers the schedule. Throws InfeasibleError when the balances
// cannot close, DataError when the solver gives up.
DayAheadResult benchmark_schedule(const SystemConfig& c, const DayProfile& forecast,
                                  const PriceBook& p);

}  // namespace mves
