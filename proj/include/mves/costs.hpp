#pragma once

#include "mves/types.hpp"

namespace mves {

// Day-ahead cost of slot t, GBP: energy purchases at day-ahead tariffs minus
// rewards for storage use (paid on absolute flow) and renewable generation.
// The renewable terms read from the profile passed in: the forecast when
// pricing a plan, the actuals at settlement.
double scheduling_cost(const SystemConfig& c, const Schedule& s, const DayProfile& profile,
                       const PriceBook& p, int t);

// Slot imbalance between scheduled supply and actual conditions, expressed
// at the meter: positive means the system came up short and must buy in
// real time. Electricity first, gas second.
std::pair<double, double> mismatch(const SystemConfig& c, const Schedule& s,
                                   const DayProfile& actual, int t);

// Real-time correction charges for one slot. Shortfall is bought at the
// real-time rate; surplus is sold back, crediting the sell rate against the
// day-ahead price already paid. A zero imbalance settles on the buy branch.
std::pair<double, double> extra_cost(const PriceBook& p, double d_elec, double d_gas, int t);

// Sum over every storage device in service at slot t of the distance by
// which its stored level leaves the allowed corridor, kWh; unit-priced.
double penalty_cost(const SystemConfig& c, const Schedule& s, int t);

// Per-device corridor excursion series for a whole day; one value >= 0 per
// slot. Row-sums of this matrix give penalty_cost per slot.
Vec penalty_series(const SystemConfig& c, const Schedule& s);

// Settle one scheduled day against what actually happened. Scheduling cost
// is evaluated with actual renewable output; corrections and penalties fill
// the remaining columns. The forecast argument is the profile the schedule
// was built against and is only shape-checked here.
CostLedger total_cost_day(const SystemConfig& c, const Schedule& s, const DayProfile& forecast,
                          const DayProfile& actual, const PriceBook& p);

// d(total settled cost + lambda * penalty)/d(schedule), holding actuals
// fixed. Kink conventions: |x| has slope 0 at 0, corridor penalties use the
// deficit branch at touch, corrections the buy branch at zero imbalance.
struct ScheduleGrad {
  Vec grid_import, gas_import, chp_frac, boiler_frac;
  Mat ev_flow, tes_flow;

  static ScheduleGrad zero(const SystemConfig& c);
  void scale(double f);
  void add(const ScheduleGrad& o);
};

ScheduleGrad settlement_gradient(const SystemConfig& c, const Schedule& s,
                                 const DayProfile& actual, const PriceBook& p,
                                 double lambda);

}  // namespace mves
