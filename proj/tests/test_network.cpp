#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>

#include "mves/checkpoint.hpp"
#include "mves/data.hpp"
#include "mves/enforce.hpp"
#include "mves/feasibility.hpp"
#include "mves/network.hpp"
#include "mves/rng.hpp"
#include "mves/training.hpp"

using namespace mves;

namespace {

NetworkParams tiny_net(const SystemConfig& c, std::uint64_t seed) {
  NetworkDims d = network_dims(c);
  d.hidden = {10, 8, 6};
  return init_network(d, Vec::Ones(d.input), seed);
}

SystemConfig small_config() {
  SystemConfig c = default_system();
  c.slots = 4;
  c.ev.count = 1;
  c.ev.window = {{0, 3}};
  c.ev.soc_start = {60.0};
  c.tes.count = 1;
  c.tes.window = {{0, 3}};
  c.tes.soc_start = {120.0};
  return c;
}

DayProfile ramp_profile(int slots, double le, double lh, double w, double pv) {
  DayProfile f;
  f.elec_load = Vec::LinSpaced(slots, le * 0.8, le * 1.2);
  f.heat_load = Vec::LinSpaced(slots, lh * 1.1, lh * 0.9);
  f.wind = Vec::LinSpaced(slots, w * 0.5, w * 1.5);
  f.pv = Vec::LinSpaced(slots, pv * 1.4, pv * 0.6);
  return f;
}

ErrorSample error_sample(int slots, double elec, double heat, double wind, double pv) {
  return {Vec::Constant(slots, elec), Vec::Constant(slots, heat), Vec::Constant(slots, wind),
          Vec::Constant(slots, pv)};
}

}  // namespace

TEST_CASE("network dimensions follow the fleet sizes") {
  const NetworkDims d = network_dims(default_system());
  CHECK(d.input == 96);
  CHECK(d.output == 216);
  CHECK(d.chain() == std::vector<int>{96, 768, 576, 384, 216});
  const NetworkDims dl = network_dims(large_system());
  CHECK(dl.input == 96);
  CHECK(dl.output == 312);
}

TEST_CASE("default initialization is reproducible and fully counted") {
  const SystemConfig c = default_system();
  const NetworkParams a = init_network(c, 7);
  const NetworkParams b = init_network(c, 7);
  const NetworkParams other = init_network(c, 8);
  CHECK(a.parameter_count() == 822168);
  CHECK(std::memcmp(a.w[0].data(), b.w[0].data(), sizeof(double) * a.w[0].size()) == 0);
  CHECK(std::memcmp(a.b[3].data(), b.b[3].data(), sizeof(double) * a.b[3].size()) == 0);
  CHECK(a.w[0](0, 0) != other.w[0](0, 0));
  CHECK(a.input_scale[0] == 1000.0);
  CHECK(a.input_scale[24] == 720.0);
  CHECK(a.input_scale[48] == 200.0);
  CHECK(a.input_scale[72] == 200.0);
  const double bound = 1.0 / std::sqrt(96.0);
  CHECK(a.w[0].cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("leaky rectifier passes positives and quarters negatives") {
  NetworkDims d;
  d.input = 1;
  d.hidden = {1, 1, 1};
  d.output = 1;
  NetworkParams p;
  p.dims = d;
  for (int l = 0; l < 4; ++l) {
    p.w.push_back(Mat::Constant(1, 1, 1.0));
    p.b.push_back(Vec::Zero(1));
  }
  p.input_scale = Vec::Ones(1);
  Vec x(1);
  x[0] = 2.0;
  CHECK(forward_raw(p, x)[0] == doctest::Approx(2.0));
  x[0] = -1.0;
  // three rectifiers quarter the signal, the last layer stays raw
  CHECK(forward_raw(p, x)[0] == doctest::Approx(-0.015625));
}

TEST_CASE("zero parameters produce a zero output vector") {
  const SystemConfig c = default_system();
  NetworkParams p = init_network(c, 1);
  for (auto& w : p.w) w.setZero();
  for (auto& b : p.b) b.setZero();
  const Vec out = forward_raw(p, Vec::Constant(96, 300.0));
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass is bitwise deterministic") {
  const SystemConfig c = default_system();
  const NetworkParams p = init_network(c, 11);
  const Vec x = flatten_forecast(ramp_profile(24, 420, 260, 40, 30));
  const Vec y1 = forward_raw(p, x);
  const Vec y2 = forward_raw(p, x);
  CHECK(std::memcmp(y1.data(), y2.data(), sizeof(double) * y1.size()) == 0);
}

TEST_CASE("network gradient matches finite differences") {
  const SystemConfig c = small_config();
  const NetworkParams p = tiny_net(c, 3);
  const Vec x = flatten_forecast(ramp_profile(4, 300, 200, 30, 20));
  Rng rng(99);
  Vec probe(p.dims.output);
  for (int i = 0; i < probe.size(); ++i) probe[i] = rng.uniform(-1.0, 1.0);

  ForwardCache fc;
  forward_raw(p, x, &fc);
  NetworkGrad g = NetworkGrad::zero(p);
  backward_raw(p, fc, probe, g);

  auto phi = [&](const NetworkParams& q) { return probe.dot(forward_raw(q, x)); };
  int checked = 0, ok = 0;
  for (size_t l = 0; l < p.w.size(); ++l) {
    for (int trial = 0; trial < 25; ++trial) {
      const int i = static_cast<int>(rng.below(p.w[l].rows()));
      const int j = static_cast<int>(rng.below(p.w[l].cols()));
      NetworkParams q = p;
      const double h = 1e-6 * std::max(1.0, std::abs(p.w[l](i, j)));
      q.w[l](i, j) = p.w[l](i, j) + h;
      const double up = phi(q);
      q.w[l](i, j) = p.w[l](i, j) - h;
      const double dn = phi(q);
      const double fd = (up - dn) / (2 * h);
      ++checked;
      if (std::abs(fd - g.w[l](i, j)) <= 1e-5 * std::max(1.0, std::abs(fd))) ++ok;
    }
  }
  CHECK(checked == 100);
  CHECK(ok >= 98);
}

TEST_CASE("enforcement maps zero raw to the centred schedule") {
  const SystemConfig c = default_system();
  const Schedule s = enforce_constraints(c, Vec::Zero(raw_width(c)));
  for (int t = 0; t < 24; ++t) {
    CHECK(s.grid_import[t] == doctest::Approx(500.0));
    CHECK(s.gas_import[t] == doctest::Approx(600.0));
    CHECK(s.chp_frac[t] == doctest::Approx(0.5));
    CHECK(s.boiler_frac[t] == doctest::Approx(0.5));
  }
  CHECK(s.ev_flow.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.tes_flow.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("enforcement caps both converter gas routes") {
  SystemConfig c = default_system();
  Vec raw = Vec::Zero(raw_width(c));
  for (int t = 0; t < 24; ++t) raw[24 + t] = 40.0;  // gas import channel saturated high
  for (int t = 0; t < 12; ++t) raw[48 + t] = 40.0;  // dispatch pushed to the chp side
  for (int t = 12; t < 24; ++t) raw[48 + t] = -40.0;  // then to the boiler side
  const Schedule s = enforce_constraints(c, raw);
  for (int t = 0; t < 24; ++t) {
    CHECK(s.chp_frac[t] * s.gas_import[t] <= c.chp_gas_max + 1e-9);
    CHECK(s.boiler_frac[t] * s.gas_import[t] <= c.boiler_gas_max + 1e-9);
  }
}

TEST_CASE("random raw vectors only ever violate the storage corridors") {
  const SystemConfig c = default_system();
  const DayProfile f = ramp_profile(24, 420, 260, 40, 30);
  Rng rng(5150);
  for (int trial = 0; trial < 60; ++trial) {
    Vec raw(raw_width(c));
    for (int i = 0; i < raw.size(); ++i) raw[i] = rng.uniform(-6.0, 6.0);
    const Schedule s = enforce_constraints(c, raw);
    for (const Violation& v : check_feasibility(c, f, s)) {
      const bool soc = v.kind == ViolationKind::EvSoc || v.kind == ViolationKind::TesSoc;
      const bool balance =
          v.kind == ViolationKind::ElecBalance || v.kind == ViolationKind::HeatBalance;
      // balances depend on the forecast, which no output stage can guarantee
      CHECK((soc || balance));
    }
    for (int k = 0; k < c.ev.count; ++k) {
      double net = 0.0;
      for (int t = 0; t < 24; ++t) {
        net += s.ev_flow(k, t);
        CHECK(s.ev_flow(k, t) >= c.ev.flow_lo() - 1e-9);
        CHECK(s.ev_flow(k, t) <= c.ev.flow_hi() + 1e-9);
      }
      CHECK(std::abs(net) <= 1e-9);
    }
  }
}

TEST_CASE("window zeroing and mean removal hold on narrow windows") {
  SystemConfig c = default_system();
  c.ev.window[1] = {6, 13};
  c.tes.window[0] = {2, 21};
  Rng rng(77);
  Vec raw(raw_width(c));
  for (int i = 0; i < raw.size(); ++i) raw[i] = rng.uniform(-4.0, 4.0);
  const Schedule s = enforce_constraints(c, raw);
  for (int t = 0; t < 24; ++t) {
    if (t < 6 || t > 13) CHECK(s.ev_flow(1, t) == 0.0);
    if (t < 2 || t > 21) CHECK(s.tes_flow(0, t) == 0.0);
  }
  double net = 0.0;
  for (int t = 6; t <= 13; ++t) net += s.ev_flow(1, t);
  CHECK(std::abs(net) <= 1e-9);
}

TEST_CASE("enforcement backward matches finite differences") {
  const SystemConfig c = small_config();
  Rng rng(31);
  Vec raw(raw_width(c));
  for (int i = 0; i < raw.size(); ++i) raw[i] = rng.uniform(-2.0, 2.0);

  ScheduleGrad dir = ScheduleGrad::zero(c);
  auto fill = [&](auto& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  };
  fill(dir.grid_import);
  fill(dir.gas_import);
  fill(dir.chp_frac);
  fill(dir.boiler_frac);
  fill(dir.ev_flow);
  fill(dir.tes_flow);

  auto phi = [&](const Vec& r) {
    const Schedule s = enforce_constraints(c, r);
    return dir.grid_import.dot(s.grid_import) + dir.gas_import.dot(s.gas_import) +
           dir.chp_frac.dot(s.chp_frac) + dir.boiler_frac.dot(s.boiler_frac) +
           dir.ev_flow.cwiseProduct(s.ev_flow).sum() +
           dir.tes_flow.cwiseProduct(s.tes_flow).sum();
  };

  EnforceCache cache;
  enforce_constraints(c, raw, &cache);
  const Vec grad = enforce_backward(c, cache, dir);

  int ok = 0;
  for (int i = 0; i < raw.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(raw[i]));
    Vec up = raw, dn = raw;
    up[i] += h;
    dn[i] -= h;
    const double fd = (phi(up) - phi(dn)) / (2 * h);
    if (std::abs(fd - grad[i]) <= 1e-5 * std::max(1.0, std::abs(fd))) ++ok;
  }
  CHECK(ok >= raw.size() - 1);
}

TEST_CASE("full composite gradient matches finite differences") {
  const SystemConfig c = small_config();
  const PriceBook p = default_prices(4);
  const NetworkParams np = tiny_net(c, 21);
  const std::vector<DayProfile> forecasts = {ramp_profile(4, 300, 200, 30, 20),
                                             ramp_profile(4, 350, 180, 20, 25)};
  const std::vector<ErrorSample> errors = {error_sample(4, 0.05, -0.03, 0.10, -0.08),
                                           error_sample(4, -0.04, 0.06, -0.12, 0.09),
                                           error_sample(4, 0.0, 0.0, 0.0, 0.0)};
  const double lambda = 1.0;

  NetworkGrad g = NetworkGrad::zero(np);
  const double base = batch_gradient(np, c, p, forecasts, errors, lambda, g);
  CHECK(base == doctest::Approx(batch_loss(np, c, p, forecasts, errors, lambda)));

  Rng rng(4242);
  int checked = 0, ok = 0;
  for (size_t l = 0; l < np.w.size(); ++l) {
    for (int trial = 0; trial < 20; ++trial) {
      const int i = static_cast<int>(rng.below(np.w[l].rows()));
      const int j = static_cast<int>(rng.below(np.w[l].cols()));
      NetworkParams q = np;
      const double h = 1e-5 * std::max(1.0, std::abs(np.w[l](i, j)));
      q.w[l](i, j) += h;
      const double up = batch_loss(q, c, p, forecasts, errors, lambda);
      q.w[l](i, j) -= 2 * h;
      const double dn = batch_loss(q, c, p, forecasts, errors, lambda);
      const double fd = (up - dn) / (2 * h);
      ++checked;
      if (std::abs(fd - g.w[l](i, j)) <= 1e-4 * std::max(1e-3, std::abs(fd))) ++ok;
    }
  }
  CHECK(checked == 80);
  CHECK(ok >= 76);
}

TEST_CASE("loss reduces to the deterministic day cost with zero errors") {
  const SystemConfig c = small_config();
  const PriceBook p = default_prices(4);
  const NetworkParams np = tiny_net(c, 13);
  const DayProfile f = ramp_profile(4, 300, 200, 30, 20);
  const std::vector<ErrorSample> zero_err = {error_sample(4, 0, 0, 0, 0)};

  const Schedule s = neural_schedule(np, c, f);
  const CostLedger led = total_cost_day(c, s, f, f, p);
  const double l0 = batch_loss(np, c, p, {f}, zero_err, 0.0);
  CHECK(l0 == doctest::Approx(led.total_all()));

  // lambda enters linearly through the corridor penalty
  const double l1 = batch_loss(np, c, p, {f}, zero_err, 1.0);
  const double l2 = batch_loss(np, c, p, {f}, zero_err, 2.0);
  CHECK(l2 - l1 == doctest::Approx(l1 - l0));
  CHECK(l1 - l0 == doctest::Approx(led.total_penalty()));
}

TEST_CASE("adam stands still on zero gradients and steps toward minus sign") {
  const SystemConfig c = small_config();
  NetworkParams np = tiny_net(c, 17);
  const NetworkParams before = np;
  AdamState st = AdamState::zero(np);
  TrainConfig t;
  t.lr = 0.01;

  adam_step(np, st, NetworkGrad::zero(np), t);
  CHECK(std::memcmp(np.w[0].data(), before.w[0].data(), sizeof(double) * np.w[0].size()) == 0);
  CHECK(st.step == 1);

  // the very first bias-corrected step moves by almost exactly lr per coordinate
  st = AdamState::zero(np);
  NetworkGrad g = NetworkGrad::zero(np);
  g.w[0](0, 0) = 2.5;
  g.w[0](0, 1) = -0.3;
  adam_step(np, st, g, t);
  CHECK(np.w[0](0, 0) == doctest::Approx(before.w[0](0, 0) - 0.01).epsilon(1e-6));
  CHECK(np.w[0](0, 1) == doctest::Approx(before.w[0](0, 1) + 0.01).epsilon(1e-6));

  const double after_one = np.w[0](0, 0);
  adam_step(np, st, g, t);
  CHECK(np.w[0](0, 0) < after_one);
}

TEST_CASE("training is reproducible and improves the loss on a small world") {
  const SystemConfig c = small_config();
  const PriceBook p = default_prices(4);
  const std::vector<DayProfile> forecasts = {ramp_profile(4, 300, 200, 30, 20),
                                             ramp_profile(4, 260, 230, 25, 15)};
  const std::vector<ErrorSample> errors = {error_sample(4, 0.04, -0.02, 0.08, -0.05),
                                           error_sample(4, -0.03, 0.05, -0.10, 0.07),
                                           error_sample(4, 0.01, 0.01, -0.02, 0.02)};
  TrainConfig t;
  t.lr = 1e-3;
  t.lambda = 1.0;
  t.forecast_batch = 2;
  t.error_batch = 3;
  t.batches_per_epoch = 25;
  t.epochs = 4;
  t.seed = 2024;

  const NetworkParams start = tiny_net(c, 55);
  const TrainResult a = train(c, p, forecasts, errors, t, start, AdamState::zero(start));
  const TrainResult b = train(c, p, forecasts, errors, t, start, AdamState::zero(start));

  REQUIRE(a.epoch_loss.size() == 4);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
  CHECK(a.best_epoch >= 1);
  for (size_t l = 0; l < a.params.w.size(); ++l)
    CHECK(std::memcmp(a.params.w[l].data(), b.params.w[l].data(),
                      sizeof(double) * a.params.w[l].size()) == 0);
  CHECK(a.state.step == 100);

  // zero batches leave the starting point untouched
  TrainConfig t0 = t;
  t0.batches_per_epoch = 0;
  const TrainResult frozen = train(c, p, forecasts, errors, t0, start, AdamState::zero(start));
  CHECK(std::memcmp(frozen.params.w[0].data(), start.w[0].data(),
                    sizeof(double) * start.w[0].size()) == 0);
}

TEST_CASE("train config validation rejects nonsense") {
  TrainConfig t;
  t.lr = 0.0;
  CHECK_THROWS_AS(validate(t), DataError);
  t = TrainConfig{};
  t.lambda = -1.0;
  CHECK_THROWS_AS(validate(t), DataError);
  t = TrainConfig{};
  t.forecast_batch = 0;
  CHECK_THROWS_AS(validate(t), DataError);
  t = TrainConfig{};
  t.beta2 = 1.0;
  CHECK_THROWS_AS(validate(t), DataError);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  const SystemConfig c = small_config();
  Checkpoint ck;
  ck.epoch = 3;
  ck.dataset_hash = 0xdeadbeefcafe1234ULL;
  ck.train.lr = 1e-3;
  ck.train.seed = 99;
  ck.train.epochs = 7;
  ck.params = tiny_net(c, 41);
  ck.state = AdamState::zero(ck.params);
  ck.state.step = 456;
  Rng rng(8);
  for (auto& m : ck.state.m.w)
    for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * 1e-4;
  for (auto& v : ck.state.v.w)
    for (int i = 0; i < v.size(); ++i) v.data()[i] = std::abs(rng.normal()) * 1e-7;

  const std::string path = "ck_roundtrip.txt";
  save_checkpoint(ck, path);
  const Checkpoint back = load_checkpoint(path);
  std::remove(path.c_str());

  CHECK(back.version == 1);
  CHECK(back.epoch == 3);
  CHECK(back.dataset_hash == ck.dataset_hash);
  CHECK(back.train.lr == ck.train.lr);
  CHECK(back.train.seed == 99);
  CHECK(back.train.epochs == 7);
  CHECK(back.state.step == 456);
  REQUIRE(back.params.w.size() == ck.params.w.size());
  for (size_t l = 0; l < ck.params.w.size(); ++l) {
    CHECK(std::memcmp(back.params.w[l].data(), ck.params.w[l].data(),
                      sizeof(double) * ck.params.w[l].size()) == 0);
    CHECK(std::memcmp(back.params.b[l].data(), ck.params.b[l].data(),
                      sizeof(double) * ck.params.b[l].size()) == 0);
    CHECK(std::memcmp(back.state.m.w[l].data(), ck.state.m.w[l].data(),
                      sizeof(double) * ck.state.m.w[l].size()) == 0);
    CHECK(std::memcmp(back.state.v.w[l].data(), ck.state.v.w[l].data(),
                      sizeof(double) * ck.state.v.w[l].size()) == 0);
  }

  const Vec x = Vec::Constant(ck.params.dims.input, 123.0);
  const Vec y1 = forward_raw(ck.params, x);
  const Vec y2 = forward_raw(back.params, x);
  CHECK(std::memcmp(y1.data(), y2.data(), sizeof(double) * y1.size()) == 0);
}

TEST_CASE("checkpoint loader refuses damaged files") {
  const SystemConfig c = small_config();
  Checkpoint ck;
  ck.params = tiny_net(c, 2);
  ck.state = AdamState::zero(ck.params);
  const std::string path = "ck_damaged.txt";
  save_checkpoint(ck, path);

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::ofstream truncated(path, std::ios::trunc);
  truncated << text.substr(0, text.size() / 2);
  truncated.close();
  CHECK_THROWS_AS(load_checkpoint(path), DataError);

  std::ofstream wrong(path, std::ios::trunc);
  wrong << "mves-net 9\n";
  wrong.close();
  CHECK_THROWS_AS(load_checkpoint(path), DataError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_checkpoint("no_such_file.txt"), DataError);
}

TEST_CASE("dataset fingerprints react to any content change") {
  DayProfile f = ramp_profile(4, 300, 200, 30, 20);
  const ErrorSample e = error_sample(4, 0.01, 0.02, 0.03, 0.04);
  const std::uint64_t h1 = dataset_fingerprint({f}, {e});
  CHECK(h1 == dataset_fingerprint({f}, {e}));
  f.pv[3] += 1e-12;
  CHECK(h1 != dataset_fingerprint({f}, {e}));
}

TEST_CASE("realized days scale the forecast and never go negative") {
  DayProfile f = ramp_profile(4, 300, 200, 30, 20);
  ErrorSample e = error_sample(4, 0.10, -0.50, -2.0, 0.0);
  const DayProfile r = apply_errors(f, e);
  for (int t = 0; t < 4; ++t) {
    CHECK(r.elec_load[t] == doctest::Approx(1.10 * f.elec_load[t]));
    CHECK(r.heat_load[t] == doctest::Approx(0.50 * f.heat_load[t]));
    CHECK(r.wind[t] == 0.0);
    CHECK(r.pv[t] == doctest::Approx(f.pv[t]));
  }
}
