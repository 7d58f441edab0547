#include "mves/data.hpp"

#include <cmath>
#include <stdexcept>

#include "mves/rng.hpp"

namespace mves {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double shape_at(const SeriesShape& s, int hour) {
  const double w = 2.0 * kPi / 24.0;
  return 1.0 + s.amp1 * std::cos(w * (hour - s.phase1)) +
         s.amp2 * std::cos(2.0 * w * (hour - s.phase2));
}

Vec draw_series(const SeriesShape& s, int slots, int day, Rng& rng) {
  // day 0 is a Monday; the yearly cycle peaks around mid January
  const bool weekend = day % 7 >= 5;
  const double season = 1.0 + s.seasonal * std::cos(2.0 * kPi * (day % 365 - 15) / 365.0);
  const double scale = s.base * season * (weekend ? s.weekend : 1.0);
  Vec out(slots);
  for (int h = 0; h < slots; ++h) {
    double z = rng.normal();
    z = std::min(3.0, std::max(-3.0, z));
    const double v = scale * shape_at(s, h) * (1.0 + s.noise * z);
    out[h] = std::min(s.cap, std::max(0.0, v));
  }
  return out;
}

Vec draw_error_channel(const ErrorChannelSpec& ch, const ErrorSpec& spec, Rng& rng) {
  Vec raw(spec.slots);
  for (int t = 0; t < spec.slots; ++t) {
    double d;
    if (ch.family == ErrorFamily::ScaledBeta) {
      d = ch.mean + ch.sigma * (2.0 * rng.beta(2.0, 2.0) - 1.0);
    } else {
      d = ch.mean + ch.sigma * rng.normal();
    }
    raw[t] = d;
  }
  // lag-1 blend over the centered part keeps the marginal spread, then the
  // cap is applied again so blending cannot leak past it
  Vec out(spec.slots);
  const double mix = std::sqrt(1.0 - spec.rho * spec.rho);
  double prev = 0.0;
  for (int t = 0; t < spec.slots; ++t) {
    const double c = raw[t] - ch.mean;
    prev = t == 0 ? c : spec.rho * prev + mix * c;
    out[t] = std::min(spec.cap, std::max(-spec.cap, ch.mean + prev));
  }
  return out;
}

}  // namespace

ProfileSpec default_profiles() {
  ProfileSpec p;
  p.slots = 24;
  p.elec = {420.0, 0.32, 18.0, 0.10, 12.0, 0.93, 0.12, 0.03, 800.0};
  p.heat = {260.0, 0.08, 7.0, 0.20, 7.0, 1.04, 0.22, 0.04, 600.0};
  p.wind = {40.0, 0.15, 3.0, 0.0, 0.0, 1.0, 0.15, 0.18, 200.0};
  p.pv = {32.0, 1.90, 13.0, 0.0, 0.0, 1.0, -0.35, 0.10, 200.0};
  return p;
}

std::vector<DayProfile> generate_base_days(const ProfileSpec& spec, int n_days,
                                           std::uint64_t seed) {
  if (spec.slots <= 0) throw DataError("profile spec needs at least one slot");
  if (n_days < 0) throw DataError("negative day count");
  std::vector<DayProfile> days;
  days.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    // one stream per day so any day can be regenerated in isolation
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(d)));
    DayProfile p;
    p.elec_load = draw_series(spec.elec, spec.slots, d, rng);
    p.heat_load = draw_series(spec.heat, spec.slots, d, rng);
    p.wind = draw_series(spec.wind, spec.slots, d, rng);
    p.pv = draw_series(spec.pv, spec.slots, d, rng);
    days.push_back(std::move(p));
  }
  return days;
}

std::vector<DayProfile> augment_forecasts(const std::vector<DayProfile>& base, int pool_size,
                                          std::uint64_t seed) {
  if (base.size() < 2) throw DataError("augmentation needs at least two base days");
  if (pool_size < 0) throw DataError("negative pool size");
  const std::uint64_t aug_seed = mix_seed(seed, 0x61756774ULL);
  std::vector<DayProfile> pool;
  pool.reserve(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) {
    Rng rng(mix_seed(aug_seed, static_cast<std::uint64_t>(i)));
    const std::size_t k = std::min<std::size_t>(2 + rng.below(3), base.size());
    std::vector<std::size_t> picks;
    while (picks.size() < k) {
      const std::size_t j = rng.below(base.size());
      bool seen = false;
      for (std::size_t q : picks) seen = seen || q == j;
      if (!seen) picks.push_back(j);
    }
    // exponential gaps make the weights uniform over the simplex
    std::vector<double> w(k);
    double total = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
      double u;
      do {
        u = rng.uniform();
      } while (u == 0.0);
      w[q] = -std::log(u);
      total += w[q];
    }
    const int slots = static_cast<int>(base[0].elec_load.size());
    DayProfile p;
    p.elec_load = Vec::Zero(slots);
    p.heat_load = Vec::Zero(slots);
    p.wind = Vec::Zero(slots);
    p.pv = Vec::Zero(slots);
    for (std::size_t q = 0; q < k; ++q) {
      const double f = w[q] / total;
      const DayProfile& src = base[picks[q]];
      p.elec_load += f * src.elec_load;
      p.heat_load += f * src.heat_load;
      p.wind += f * src.wind;
      p.pv += f * src.pv;
    }
    pool.push_back(std::move(p));
  }
  return pool;
}

ErrorSpec default_errors() {
  ErrorSpec e;
  e.slots = 24;
  // day-ahead forecasts run hot on renewables and light on demand
  e.elec = {ErrorFamily::TruncatedGaussian, 0.08, 0.02};
  e.heat = {ErrorFamily::TruncatedGaussian, 0.10, 0.02};
  e.wind = {ErrorFamily::TruncatedGaussian, 0.20, -0.10};
  e.pv = {ErrorFamily::TruncatedGaussian, 0.15, -0.08};
  e.cap = 0.45;
  e.rho = 0.5;
  return e;
}

std::vector<ErrorSample> sample_errors(const ErrorSpec& spec, int n, std::uint64_t seed) {
  if (spec.slots <= 0) throw DataError("error spec needs at least one slot");
  if (n < 0) throw DataError("negative sample count");
  if (spec.cap < 0.0) throw DataError("negative error cap");
  if (spec.rho <= -1.0 || spec.rho >= 1.0) throw DataError("lag-1 weight must be inside (-1, 1)");
  std::vector<ErrorSample> out;
  out.reserve(static_cast<std::size_t>(n));
  const std::uint64_t err_seed = mix_seed(seed, 0x657272ULL);
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(err_seed, static_cast<std::uint64_t>(i)));
    ErrorSample e;
    e.elec = draw_error_channel(spec.elec, spec, rng);
    e.heat = draw_error_channel(spec.heat, spec, rng);
    e.wind = draw_error_channel(spec.wind, spec, rng);
    e.pv = draw_error_channel(spec.pv, spec, rng);
    out.push_back(std::move(e));
  }
  return out;
}

DayProfile apply_errors(const DayProfile& f, const ErrorSample& e) {
  auto scaled = [](const Vec& base, const Vec& err) {
    return ((Vec::Ones(base.size()) + err).cwiseProduct(base)).cwiseMax(0.0);
  };
  DayProfile out;
  out.elec_load = scaled(f.elec_load, e.elec);
  out.heat_load = scaled(f.heat_load, e.heat);
  out.wind = scaled(f.wind, e.wind);
  out.pv = scaled(f.pv, e.pv);
  return out;
}

}  // namespace mves
