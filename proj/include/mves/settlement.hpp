#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mves/network.hpp"
#include "mves/types.hpp"

namespace mves {

// One storage flow changed by the pre-settlement repair. stretched marks a
// forced final-slot write that had to leave the device's flow bounds.
struct Adjustment {
  bool tes = false;
  int device = 0;
  int slot = 0;
  double before = 0.0;
  double after = 0.0;
  bool stretched = false;
};

struct AdjustResult {
  Schedule schedule;
  std::vector<Adjustment> log;
};

// Repairs stored-energy corridor violations per device window: walk the
// window clipping any flow that would push the level outside the corridor,
// then return the clipped net energy at the earliest later slots that have
// both flow headroom and corridor slack. Whatever cannot be placed that way
// is forced into the window's last slot, where the corridor provably
// re-admits it, and flagged as a bound stretch rather than dropped. Window
// net flow is preserved exactly; corridor-feasible schedules pass through
// untouched, which also makes the repair idempotent.
AdjustResult adjust_soc(const SystemConfig& c, const Schedule& s);

// Schedule rejected at settlement intake. Balance mismatch and corridor
// excursions are not grounds for rejection (the first is priced, the second
// repaired); everything else is.
struct ScheduleError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ScheduleError(std::string msg, std::vector<Violation> v)
      : std::runtime_error(std::move(msg)), violations(std::move(v)) {}
};

struct SettlementResult {
  CostLedger ledger;  // for the repaired schedule; adjustment holds the repair's cost delta
  Vec delta_elec;
  Vec delta_gas;
  Schedule adjusted;
  std::vector<Adjustment> adjustments;
};

// Real-time phase for one day: repair the schedule, then price it against
// what actually happened. The repair's cost delta compares repaired and
// original schedules under the same actuals.
SettlementResult settle_day(const SystemConfig& c, const PriceBook& p, const Schedule& s,
                            const DayProfile& forecast, const DayProfile& actual);

// Day totals of the scheduling-cost components; rewards count positive here.
// grid + gas - ev_reward - tes_reward - renewable_reward gives the ledger's
// scheduling total.
struct CostParts {
  double grid = 0.0;
  double gas = 0.0;
  double ev_reward = 0.0;
  double tes_reward = 0.0;
  double renewable_reward = 0.0;

  double sched_total() const { return grid + gas - ev_reward - tes_reward - renewable_reward; }
};

CostParts cost_parts(const SystemConfig& c, const Schedule& s, const DayProfile& profile,
                     const PriceBook& p);

enum class Method { Benchmark, Neural, Ideal };
const char* to_string(Method m);

struct DayOutcome {
  int day = 0;
  double total = 0.0;  // scheduling plus corrections
  double extra = 0.0;
  double penalty = 0.0;
  double adjustment = 0.0;
  CostParts parts;
  Vec hourly;  // per-slot scheduling plus correction cost
};

struct MethodReport {
  Method method = Method::Benchmark;
  std::vector<DayOutcome> days;
  CostParts avg_parts;  // per-day averages
  double avg_extra = 0.0;
  double avg_total = 0.0;
  double adjustment_total = 0.0;
  Vec hourly_avg;                     // mean over days per slot
  std::vector<double> monthly_total;  // consecutive 31-day blocks, last may be short
};

struct EvaluationReport {
  std::vector<MethodReport> runs;

  const MethodReport* find(Method m) const;
  // 1 - (proposed - ideal)/(benchmark - ideal) on average daily correction
  // cost; needs all three runs and a benchmark strictly above ideal.
  double extra_cost_reduction() const;
};

struct ExperimentSpec {
  std::vector<Method> methods;
  const NetworkParams* net = nullptr;  // required when Neural is requested
};

// Settles each (forecast, actual) day pair under every requested method.
// Ideal plans against the actuals themselves, so its correction cost is
// zero by construction; days are independent and aggregated in input order.
EvaluationReport run_experiment(const SystemConfig& c, const PriceBook& p,
                                const std::vector<DayProfile>& forecasts,
                                const std::vector<DayProfile>& actuals,
                                const ExperimentSpec& spec);

}  // namespace mves
