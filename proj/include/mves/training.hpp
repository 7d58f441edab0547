#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mves/enforce.hpp"
#include "mves/network.hpp"

namespace mves {

struct TrainConfig {
  double lr = 1e-5;
  double lambda = 1.0;  // weight on the storage corridor penalty
  int forecast_batch = 4;
  int error_batch = 55;
  int batches_per_epoch = 10000;
  int epochs = 1;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void validate(const TrainConfig& t);

struct AdamState {
  NetworkGrad m;
  NetworkGrad v;
  std::int64_t step = 0;

  static AdamState zero(const NetworkParams& p);
};

// Mean over all forecast x error pairs of the settled day cost plus the
// lambda-weighted corridor penalty. One schedule per forecast; the error only
// moves the realized day.
double batch_loss(const NetworkParams& np, const SystemConfig& c, const PriceBook& p,
                  const std::vector<DayProfile>& forecasts,
                  const std::vector<ErrorSample>& errors, double lambda);

// Same reduction, differentiated end to end through settlement, the
// enforcement stage and the network. Overwrites acc; returns the loss.
double batch_gradient(const NetworkParams& np, const SystemConfig& c, const PriceBook& p,
                      const std::vector<DayProfile>& forecasts,
                      const std::vector<ErrorSample>& errors, double lambda, NetworkGrad& acc);

void adam_step(NetworkParams& np, AdamState& st, const NetworkGrad& g, const TrainConfig& t);

struct EpochReport {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  bool best = false;
};

struct TrainResult {
  NetworkParams params;
  AdamState state;
  std::vector<double> epoch_loss;
  int best_epoch = -1;
  double best_loss = 0.0;
};

using EpochHook =
    std::function<void(const EpochReport&, const NetworkParams&, const AdamState&)>;
using AbortHook =
    std::function<void(const std::string&, const NetworkParams&, const AdamState&)>;

// Minibatch descent from the given starting point; all sampling comes from one
// seeded stream so a run is a pure function of (seed, datasets, config). A
// non-finite loss or gradient aborts through on_abort, then throws.
TrainResult train(const SystemConfig& c, const PriceBook& p,
                  const std::vector<DayProfile>& forecasts,
                  const std::vector<ErrorSample>& errors, const TrainConfig& t,
                  NetworkParams start, AdamState start_state, const EpochHook& on_epoch = {},
                  const AbortHook& on_abort = {});

}  // namespace mves
