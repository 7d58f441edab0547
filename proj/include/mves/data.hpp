#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mves/types.hpp"

namespace mves {

// Parametric day shape: base level times first and second diurnal harmonics,
// a weekend multiplier, a yearly cosine peaking mid January, and relative
// Gaussian noise clipped at three sigma. Values land in [0, cap].
struct SeriesShape {
  double base = 0.0;
  double amp1 = 0.0;
  double phase1 = 0.0;  // hour of the first-harmonic peak
  double amp2 = 0.0;
  double phase2 = 0.0;  // hour of one of the two second-harmonic peaks
  double weekend = 1.0;
  double seasonal = 0.0;  // negative flips the peak to summer
  double noise = 0.0;
  double cap = 0.0;
};

struct ProfileSpec {
  int slots = 24;
  SeriesShape elec;
  SeriesShape heat;
  SeriesShape wind;
  SeriesShape pv;
};

// Sized so that even cap-level demand surprises stay inside the importable
// supply range of the default system, keeping every method's program feasible.
ProfileSpec default_profiles();

std::vector<DayProfile> generate_base_days(const ProfileSpec& spec, int n_days,
                                           std::uint64_t seed);

// Random convex blends of 2..4 distinct base days, Dirichlet-uniform weights.
std::vector<DayProfile> augment_forecasts(const std::vector<DayProfile>& base, int pool_size,
                                          std::uint64_t seed);

enum class ErrorFamily { TruncatedGaussian, ScaledBeta };

struct ErrorChannelSpec {
  ErrorFamily family = ErrorFamily::TruncatedGaussian;
  double sigma = 0.0;
  double mean = 0.0;
};

struct ErrorSpec {
  int slots = 24;
  ErrorChannelSpec elec;
  ErrorChannelSpec heat;
  ErrorChannelSpec wind;
  ErrorChannelSpec pv;
  double cap = 0.45;  // hard bound on |delta|
  double rho = 0.5;   // lag-1 blend across the day
};

// Loads drift high, renewables over-promise; the asymmetry is what separates
// an error-aware scheduler from one that trusts the forecast.
ErrorSpec default_errors();

std::vector<ErrorSample> sample_errors(const ErrorSpec& spec, int n, std::uint64_t seed);

// Realized day: each series scaled by (1 + relative error), floored at zero.
DayProfile apply_errors(const DayProfile& f, const ErrorSample& e);

}  // namespace mves
