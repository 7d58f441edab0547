#include "mves/settlement.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mves/costs.hpp"
#include "mves/day_ahead.hpp"
#include "mves/enforce.hpp"
#include "mves/feasibility.hpp"

namespace mves {
namespace {

constexpr double kSocTol = 1e-9;    // excursion below this is numerical dust
constexpr double kFlowTol = 1e-12;  // residual worth redistributing

void repair_fleet(const SystemConfig& c, const StorageParams& sp, bool tes, Mat& flow,
                  std::vector<Adjustment>& log) {
  const double d = c.soc_sign_literal ? 1.0 : -1.0;
  for (int k = 0; k < sp.count; ++k) {
    const ServiceWindow& w = sp.window[k];
    const int len = w.length();
    const Vec before = flow.row(k).segment(w.first, len);
    Vec f = before;

    // clip walk: put each offending flow exactly on the corridor edge
    bool clipped = false;
    double level = sp.soc_start[k];
    double residual = 0.0;
    for (int i = 0; i < len; ++i) {
      double next = level + d * f[i];
      if (next > sp.soc_max + kSocTol) {
        const double nf = (sp.soc_max - level) / d;
        residual += f[i] - nf;
        f[i] = nf;
        next = sp.soc_max;
        clipped = true;
      } else if (next < sp.soc_min - kSocTol) {
        const double nf = (sp.soc_min - level) / d;
        residual += f[i] - nf;
        f[i] = nf;
        next = sp.soc_min;
        clipped = true;
      }
      level = next;
    }
    if (!clipped) continue;

    if (std::abs(residual) > kFlowTol) {
      Vec soc(len);
      double lv = sp.soc_start[k];
      for (int i = 0; i < len; ++i) {
        lv += d * f[i];
        soc[i] = lv;
      }
      // return the clipped energy at the earliest slots that can take it;
      // a suffix minimum guards every later corridor level at once
      for (int i = 0; i < len && std::abs(residual) > kFlowTol; ++i) {
        double delta = 0.0;
        if (residual > 0.0) {
          double slack = std::numeric_limits<double>::infinity();
          for (int v = i; v < len; ++v)
            slack = std::min(slack, d < 0.0 ? soc[v] - sp.soc_min : sp.soc_max - soc[v]);
          delta = std::min({residual, sp.flow_hi() - f[i], slack});
          if (delta < 0.0) delta = 0.0;
        } else {
          double slack = std::numeric_limits<double>::infinity();
          for (int v = i; v < len; ++v)
            slack = std::min(slack, d < 0.0 ? sp.soc_max - soc[v] : soc[v] - sp.soc_min);
          delta = -std::min({-residual, f[i] - sp.flow_lo(), slack});
          if (delta > 0.0) delta = 0.0;
        }
        if (delta != 0.0) {
          f[i] += delta;
          for (int v = i; v < len; ++v) soc[v] += d * delta;
          residual -= delta;
        }
      }
      // the last slot always re-admits the leftover corridor-wise, because
      // the clip walk left the final level displaced by exactly this much;
      // only the flow bound can stretch, and that is flagged below
      if (std::abs(residual) > kFlowTol) {
        f[len - 1] += residual;
        residual = 0.0;
      }
    }

    for (int i = 0; i < len; ++i) {
      if (std::abs(f[i] - before[i]) <= kFlowTol) continue;
      const bool stretched = f[i] > sp.flow_hi() + kSocTol || f[i] < sp.flow_lo() - kSocTol;
      log.push_back({tes, k, w.first + i, before[i], f[i], stretched});
    }
    flow.row(k).segment(w.first, len) = f.transpose();
  }
}

}  // namespace

AdjustResult adjust_soc(const SystemConfig& c, const Schedule& s) {
  validate(c);
  validate(c, s);
  AdjustResult r{s, {}};
  repair_fleet(c, c.ev, false, r.schedule.ev_flow, r.log);
  repair_fleet(c, c.tes, true, r.schedule.tes_flow, r.log);
  return r;
}

SettlementResult settle_day(const SystemConfig& c, const PriceBook& p, const Schedule& s,
                            const DayProfile& forecast, const DayProfile& actual) {
  validate(c);
  validate(c, forecast);
  validate(c, actual);
  validate(c, s);
  validate(c, p);

  std::vector<Violation> hard;
  for (const Violation& v : check_feasibility(c, forecast, s)) {
    switch (v.kind) {
      case ViolationKind::ElecBalance:
      case ViolationKind::HeatBalance:
      case ViolationKind::EvSoc:
      case ViolationKind::TesSoc:
        break;
      default:
        hard.push_back(v);
    }
  }
  if (!hard.empty()) {
    std::ostringstream os;
    os << "schedule rejected: " << hard.size() << " violations:";
    const std::size_t shown = std::min<std::size_t>(hard.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
      const Violation& v = hard[i];
      os << " " << to_string(v.kind);
      if (v.slot >= 0) os << " slot " << v.slot;
      if (v.device >= 0) os << " device " << v.device;
      os << " by " << v.magnitude << ";";
    }
    if (hard.size() > shown) os << " (+" << hard.size() - shown << " more)";
    throw ScheduleError(os.str(), std::move(hard));
  }

  AdjustResult adj = adjust_soc(c, s);
  SettlementResult r;
  r.ledger = total_cost_day(c, adj.schedule, forecast, actual, p);
  if (!adj.log.empty()) {
    const CostLedger raw = total_cost_day(c, s, forecast, actual, p);
    r.ledger.adjustment = r.ledger.total_all() - raw.total_all();
  }
  r.delta_elec = Vec(c.slots);
  r.delta_gas = Vec(c.slots);
  for (int t = 0; t < c.slots; ++t) {
    const auto [de, dg] = mismatch(c, adj.schedule, actual, t);
    r.delta_elec[t] = de;
    r.delta_gas[t] = dg;
  }
  r.adjusted = std::move(adj.schedule);
  r.adjustments = std::move(adj.log);
  return r;
}

CostParts cost_parts(const SystemConfig& c, const Schedule& s, const DayProfile& profile,
                     const PriceBook& p) {
  (void)c;
  CostParts parts;
  const int slots = static_cast<int>(s.grid_import.size());
  for (int t = 0; t < slots; ++t) {
    parts.grid += p.elec_da[t] * s.grid_import[t];
    parts.gas += p.gas_da[t] * s.gas_import[t];
    parts.ev_reward += p.ev_reward * s.ev_flow.col(t).cwiseAbs().sum();
    parts.tes_reward += p.tes_reward * s.tes_flow.col(t).cwiseAbs().sum();
    parts.renewable_reward += p.wind_reward * profile.wind[t] + p.pv_reward * profile.pv[t];
  }
  return parts;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Benchmark:
      return "benchmark";
    case Method::Neural:
      return "neural";
    case Method::Ideal:
      return "ideal";
  }
  return "unknown";
}

const MethodReport* EvaluationReport::find(Method m) const {
  for (const MethodReport& r : runs)
    if (r.method == m) return &r;
  return nullptr;
}

double EvaluationReport::extra_cost_reduction() const {
  const MethodReport* ideal = find(Method::Ideal);
  const MethodReport* bench = find(Method::Benchmark);
  const MethodReport* prop = find(Method::Neural);
  if (!ideal || !bench || !prop) return std::numeric_limits<double>::quiet_NaN();
  const double denom = bench->avg_extra - ideal->avg_extra;
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - (prop->avg_extra - ideal->avg_extra) / denom;
}

EvaluationReport run_experiment(const SystemConfig& c, const PriceBook& p,
                                const std::vector<DayProfile>& forecasts,
                                const std::vector<DayProfile>& actuals,
                                const ExperimentSpec& spec) {
  if (forecasts.size() != actuals.size())
    throw DataError("run_experiment: " + std::to_string(forecasts.size()) + " forecasts vs " +
                    std::to_string(actuals.size()) + " actual days");
  if (forecasts.empty()) throw DataError("run_experiment: no days to settle");

  EvaluationReport report;
  for (Method m : spec.methods) {
    if (m == Method::Neural && spec.net == nullptr)
      throw DataError("run_experiment: neural method requested without network parameters");
    MethodReport mr;
    mr.method = m;
    mr.hourly_avg = Vec::Zero(c.slots);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
      Schedule s;
      switch (m) {
        case Method::Benchmark:
          s = benchmark_schedule(c, forecasts[i], p).schedule;
          break;
        case Method::Ideal:
          s = benchmark_schedule(c, actuals[i], p).schedule;
          break;
        case Method::Neural:
          s = neural_schedule(*spec.net, c, forecasts[i]);
          break;
      }
      // the ideal plan's reference day is the realized one
      const DayProfile& ref = m == Method::Ideal ? actuals[i] : forecasts[i];
      SettlementResult sr = settle_day(c, p, s, ref, actuals[i]);

      DayOutcome day;
      day.day = static_cast<int>(i);
      day.total = sr.ledger.total_all();
      day.extra = sr.ledger.total_extra();
      day.penalty = sr.ledger.total_penalty();
      day.adjustment = sr.ledger.adjustment;
      day.parts = cost_parts(c, sr.adjusted, actuals[i], p);
      day.hourly = Vec(c.slots);
      for (int t = 0; t < c.slots; ++t) day.hourly[t] = sr.ledger.all(t);
      mr.hourly_avg += day.hourly;
      mr.days.push_back(std::move(day));
    }

    const double n = static_cast<double>(mr.days.size());
    mr.hourly_avg /= n;
    for (const DayOutcome& day : mr.days) {
      mr.avg_parts.grid += day.parts.grid / n;
      mr.avg_parts.gas += day.parts.gas / n;
      mr.avg_parts.ev_reward += day.parts.ev_reward / n;
      mr.avg_parts.tes_reward += day.parts.tes_reward / n;
      mr.avg_parts.renewable_reward += day.parts.renewable_reward / n;
      mr.avg_extra += day.extra / n;
      mr.avg_total += day.total / n;
      mr.adjustment_total += day.adjustment;
    }
    for (std::size_t start = 0; start < mr.days.size(); start += 31) {
      double block = 0.0;
      for (std::size_t i = start; i < std::min(mr.days.size(), start + 31); ++i)
        block += mr.days[i].total;
      mr.monthly_total.push_back(block);
    }
    report.runs.push_back(std::move(mr));
  }
  return report;
}

}  // namespace mves
