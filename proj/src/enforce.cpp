#include "mves/enforce.hpp"

#include <cmath>

namespace mves {

int raw_width(const SystemConfig& c) { return (3 + c.ev.count + c.tes.count) * c.slots; }

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct FleetStage {
  Mat tanh_val;
  Mat mid;
  std::vector<double> scale;
  std::vector<int> peak;
};

void fleet_forward(int T, const StorageParams& fleet, const Vec& raw, int block0, Mat& flows,
                   FleetStage& st) {
  st.tanh_val = Mat::Zero(fleet.count, T);
  st.mid = Mat::Zero(fleet.count, T);
  st.scale.assign(fleet.count, 1.0);
  st.peak.assign(fleet.count, -1);
  const double hi = fleet.flow_hi();
  const double lo = fleet.flow_lo();
  for (int k = 0; k < fleet.count; ++k) {
    const ServiceWindow& w = fleet.window[k];
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
      const double s = std::tanh(raw[(block0 + k) * T + t]);
      st.tanh_val(k, t) = s;
      if (!w.contains(t)) continue;
      const double f = s >= 0.0 ? s * hi : s * (-lo);
      st.mid(k, t) = f;
      sum += f;
    }
    const double mean = sum / w.length();
    double worst = 1.0;
    int peak = -1;
    for (int t = w.first; t <= w.last; ++t) {
      st.mid(k, t) -= mean;
      const double f = st.mid(k, t);
      const double ratio = f > 0.0 ? f / hi : f < 0.0 ? f / lo : 0.0;
      if (ratio > worst) {
        worst = ratio;
        peak = t;
      }
    }
    if (peak >= 0) {
      st.scale[k] = 1.0 / worst;
      st.peak[k] = peak;
    }
    for (int t = w.first; t <= w.last; ++t) flows(k, t) = st.scale[k] * st.mid(k, t);
  }
}

void fleet_backward(int T, const StorageParams& fleet, const Mat& tanh_val, const Mat& mid,
                    const std::vector<double>& scale, const std::vector<int>& peak,
                    const Mat& g, Vec& d_raw, int block0) {
  const double hi = fleet.flow_hi();
  const double lo = fleet.flow_lo();
  for (int k = 0; k < fleet.count; ++k) {
    const ServiceWindow& w = fleet.window[k];
    const double r = scale[k];

    // uniform rescale: out = r*mid, with r pinned by the peak slot when r < 1
    Vec d_mid = Vec::Zero(T);
    for (int t = w.first; t <= w.last; ++t) d_mid[t] = r * g(k, t);
    if (peak[k] >= 0) {
      const int tp = peak[k];
      double inner = 0.0;
      for (int t = w.first; t <= w.last; ++t) inner += mid(k, t) * g(k, t);
      const double bound = mid(k, tp) > 0.0 ? hi : lo;
      d_mid[tp] += -(r * r / bound) * inner;
    }

    // mean removal
    double d_sum = 0.0;
    for (int t = w.first; t <= w.last; ++t) d_sum += d_mid[t];
    const double d_mean = d_sum / w.length();

    for (int t = w.first; t <= w.last; ++t) {
      const double d_pre = d_mid[t] - d_mean;
      const double s = tanh_val(k, t);
      const double branch = s >= 0.0 ? hi : -lo;
      d_raw[(block0 + k) * T + t] = d_pre * branch * (1.0 - s * s);
    }
  }
}

}  // namespace

Schedule enforce_constraints(const SystemConfig& c, const Vec& raw, EnforceCache* cache) {
  if (raw.size() != raw_width(c)) throw DataError("enforce: raw vector length mismatch");
  const int T = c.slots;
  Schedule s = Schedule::zero(c);

  Vec sig_e(T), sig_g(T), sig_v(T);
  std::vector<int> gas_branch(T, 0);
  for (int t = 0; t < T; ++t) {
    sig_e[t] = logistic(raw[t]);
    sig_g[t] = logistic(raw[T + t]);
    sig_v[t] = logistic(raw[2 * T + t]);
    s.grid_import[t] = c.grid_max * sig_e[t];
    const double v = sig_v[t];
    s.chp_frac[t] = v;
    s.boiler_frac[t] = 1.0 - v;
    const double cand[3] = {c.gas_max * sig_g[t], c.chp_gas_max / v,
                            c.boiler_gas_max / (1.0 - v)};
    int pick = 0;
    for (int i = 1; i < 3; ++i)
      if (cand[i] < cand[pick]) pick = i;
    gas_branch[t] = pick;
    s.gas_import[t] = cand[pick];
  }

  FleetStage ev, tes;
  fleet_forward(T, c.ev, raw, 3, s.ev_flow, ev);
  fleet_forward(T, c.tes, raw, 3 + c.ev.count, s.tes_flow, tes);

  if (cache) {
    cache->sig_e = std::move(sig_e);
    cache->sig_g = std::move(sig_g);
    cache->sig_v = std::move(sig_v);
    cache->gas_branch = std::move(gas_branch);
    cache->ev_tanh = std::move(ev.tanh_val);
    cache->ev_mid = std::move(ev.mid);
    cache->ev_scale = std::move(ev.scale);
    cache->ev_peak = std::move(ev.peak);
    cache->tes_tanh = std::move(tes.tanh_val);
    cache->tes_mid = std::move(tes.mid);
    cache->tes_scale = std::move(tes.scale);
    cache->tes_peak = std::move(tes.peak);
  }
  return s;
}

Vec enforce_backward(const SystemConfig& c, const EnforceCache& cache, const ScheduleGrad& g) {
  const int T = c.slots;
  Vec d_raw = Vec::Zero(raw_width(c));

  for (int t = 0; t < T; ++t) {
    const double se = cache.sig_e[t];
    d_raw[t] = g.grid_import[t] * c.grid_max * se * (1.0 - se);

    const double sg = cache.sig_g[t];
    const double v = cache.sig_v[t];
    const double dv = v * (1.0 - v);
    double d_vraw = g.chp_frac[t] * dv - g.boiler_frac[t] * dv;
    switch (cache.gas_branch[t]) {
      case 0:
        d_raw[T + t] = g.gas_import[t] * c.gas_max * sg * (1.0 - sg);
        break;
      case 1:
        d_vraw += g.gas_import[t] * (-c.chp_gas_max / (v * v)) * dv;
        break;
      case 2:
        d_vraw += g.gas_import[t] * (c.boiler_gas_max / ((1.0 - v) * (1.0 - v))) * dv;
        break;
    }
    d_raw[2 * T + t] = d_vraw;
  }

  fleet_backward(T, c.ev, cache.ev_tanh, cache.ev_mid, cache.ev_scale, cache.ev_peak,
                 g.ev_flow, d_raw, 3);
  fleet_backward(T, c.tes, cache.tes_tanh, cache.tes_mid, cache.tes_scale, cache.tes_peak,
                 g.tes_flow, d_raw, 3 + c.ev.count);
  return d_raw;
}

Schedule neural_schedule(const NetworkParams& p, const SystemConfig& c, const DayProfile& f) {
  validate(c, f);
  return enforce_constraints(c, forward_raw(p, flatten_forecast(f)));
}

}  // namespace mves
