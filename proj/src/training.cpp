#include "mves/training.hpp"

#include <cmath>
#include <limits>

#include "mves/costs.hpp"
#include "mves/data.hpp"
#include "mves/rng.hpp"

namespace mves {

void validate(const TrainConfig& t) {
  if (!(t.lr > 0.0) || !std::isfinite(t.lr)) throw DataError("train: lr must be positive");
  if (t.lambda < 0.0 || !std::isfinite(t.lambda))
    throw DataError("train: lambda must be nonnegative");
  if (t.forecast_batch < 1 || t.error_batch < 1) throw DataError("train: batch sizes must be >= 1");
  if (t.batches_per_epoch < 0 || t.epochs < 0) throw DataError("train: negative loop counts");
  if (!(t.beta1 >= 0.0 && t.beta1 < 1.0 && t.beta2 >= 0.0 && t.beta2 < 1.0))
    throw DataError("train: moment decay rates must sit in [0,1)");
  if (!(t.eps > 0.0)) throw DataError("train: eps must be positive");
}

AdamState AdamState::zero(const NetworkParams& p) {
  return {NetworkGrad::zero(p), NetworkGrad::zero(p), 0};
}

namespace {

// shared per-forecast evaluation; gradient work only when acc is present
double forecast_term(const NetworkParams& np, const SystemConfig& c, const PriceBook& p,
                     const DayProfile& f, const std::vector<ErrorSample>& errors,
                     double lambda, double pair_weight, NetworkGrad* acc) {
  ForwardCache fc;
  EnforceCache ec;
  const Vec raw = forward_raw(np, flatten_forecast(f), acc ? &fc : nullptr);
  const Schedule s = enforce_constraints(c, raw, acc ? &ec : nullptr);

  double loss = 0.0;
  ScheduleGrad sg = ScheduleGrad::zero(c);
  for (const ErrorSample& e : errors) {
    const DayProfile realized = apply_errors(f, e);
    const CostLedger led = total_cost_day(c, s, f, realized, p);
    loss += led.total_all() + lambda * led.total_penalty();
    if (acc) sg.add(settlement_gradient(c, s, realized, p, lambda));
  }
  if (acc) {
    sg.scale(pair_weight);
    const Vec d_raw = enforce_backward(c, ec, sg);
    backward_raw(np, fc, d_raw, *acc);
  }
  return loss;
}

}  // namespace

double batch_loss(const NetworkParams& np, const SystemConfig& c, const PriceBook& p,
                  const std::vector<DayProfile>& forecasts,
                  const std::vector<ErrorSample>& errors, double lambda) {
  if (forecasts.empty() || errors.empty()) throw DataError("train: empty batch");
  double sum = 0.0;
  for (const DayProfile& f : forecasts)
    sum += forecast_term(np, c, p, f, errors, lambda, 0.0, nullptr);
  return sum / (static_cast<double>(forecasts.size()) * static_cast<double>(errors.size()));
}

double batch_gradient(const NetworkParams& np, const SystemConfig& c, const PriceBook& p,
                      const std::vector<DayProfile>& forecasts,
                      const std::vector<ErrorSample>& errors, double lambda, NetworkGrad& acc) {
  if (forecasts.empty() || errors.empty()) throw DataError("train: empty batch");
  for (size_t l = 0; l < acc.w.size(); ++l) {
    acc.w[l].setZero();
    acc.b[l].setZero();
  }
  const double pair_weight =
      1.0 / (static_cast<double>(forecasts.size()) * static_cast<double>(errors.size()));
  double sum = 0.0;
  for (const DayProfile& f : forecasts)
    sum += forecast_term(np, c, p, f, errors, lambda, pair_weight, &acc);
  return sum * pair_weight;
}

void adam_step(NetworkParams& np, AdamState& st, const NetworkGrad& g, const TrainConfig& t) {
  st.step += 1;
  const double c1 = 1.0 - std::pow(t.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(t.beta2, static_cast<double>(st.step));
  auto update = [&](auto& theta, auto& m, auto& v, const auto& grad) {
    m = t.beta1 * m + (1.0 - t.beta1) * grad;
    v.array() = t.beta2 * v.array() + (1.0 - t.beta2) * grad.array().square();
    theta.array() -= t.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + t.eps);
  };
  for (size_t l = 0; l < np.w.size(); ++l) {
    update(np.w[l], st.m.w[l], st.v.w[l], g.w[l]);
    update(np.b[l], st.m.b[l], st.v.b[l], g.b[l]);
  }
}

TrainResult train(const SystemConfig& c, const PriceBook& p,
                  const std::vector<DayProfile>& forecasts,
                  const std::vector<ErrorSample>& errors, const TrainConfig& t,
                  NetworkParams start, AdamState start_state, const EpochHook& on_epoch,
                  const AbortHook& on_abort) {
  validate(c);
  validate(t);
  validate(start);
  if (forecasts.empty() || errors.empty()) throw DataError("train: empty dataset");

  TrainResult res;
  res.params = std::move(start);
  res.state = std::move(start_state);
  res.best_loss = std::numeric_limits<double>::infinity();

  Rng rng(mix_seed(t.seed, 0x747261696eULL));
  NetworkGrad acc = NetworkGrad::zero(res.params);
  std::vector<DayProfile> bf(t.forecast_batch);
  std::vector<ErrorSample> be(t.error_batch);

  for (int epoch = 1; epoch <= t.epochs; ++epoch) {
    double sum = 0.0;
    for (int batch = 0; batch < t.batches_per_epoch; ++batch) {
      for (int i = 0; i < t.forecast_batch; ++i)
        bf[i] = forecasts[rng.below(forecasts.size())];
      for (int i = 0; i < t.error_batch; ++i) be[i] = errors[rng.below(errors.size())];

      const double loss = batch_gradient(res.params, c, p, bf, be, t.lambda, acc);
      if (!std::isfinite(loss) || !std::isfinite(acc.max_abs())) {
        const std::string reason = "non-finite loss or gradient at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(batch);
        if (on_abort) on_abort(reason, res.params, res.state);
        throw DataError("train: " + reason);
      }
      adam_step(res.params, res.state, acc, t);
      sum += loss;
    }
    const double mean = t.batches_per_epoch > 0 ? sum / t.batches_per_epoch : 0.0;
    res.epoch_loss.push_back(mean);
    const bool best = mean < res.best_loss;
    if (best) {
      res.best_loss = mean;
      res.best_epoch = epoch;
    }
    if (on_epoch) on_epoch({epoch, mean, best}, res.params, res.state);
  }
  return res;
}

}  // namespace mves
