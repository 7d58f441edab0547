#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mves/checkpoint.hpp"
#include "mves/costs.hpp"
#include "mves/csv.hpp"
#include "mves/data.hpp"
#include "mves/day_ahead.hpp"
#include "mves/enforce.hpp"
#include "mves/feasibility.hpp"
#include "mves/settlement.hpp"
#include "mves/training.hpp"

namespace fs = std::filesystem;
using namespace mves;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, 16);
  return std::string(buf, res.ptr);
}

// Everything a command can consume. Numeric defaults are pulled from the
// library defaults so this table never drifts from them.
struct RunConfig {
  std::string data_dir = "data";
  std::string out_dir = "out";
  std::string checkpoint;  // empty: <out_dir>/checkpoint_best.txt

  std::uint64_t seed = 2024;
  int days = 31;
  int pool = 56172;
  int errors = 233;
  double error_cap = 0.45;
  int epochs = 1;
  int day = 0;
  std::string method = "neural";
  bool large = false;

  double lr = 0.0;
  double lambda = 0.0;
  int forecast_batch = 0;
  int error_batch = 0;
  int batches_per_epoch = 0;

  double elec_da = 0.0, gas_da = 0.0;
  double elec_rt_buy = 0.0, elec_rt_sell = 0.0;
  double gas_rt_buy = 0.0, gas_rt_sell = 0.0;
  double wind_reward = 0.0, pv_reward = 0.0, ev_reward = 0.0, tes_reward = 0.0;
};

RunConfig default_run_config() {
  RunConfig rc;
  const TrainConfig t;
  rc.lr = t.lr;
  rc.lambda = t.lambda;
  rc.forecast_batch = t.forecast_batch;
  rc.error_batch = t.error_batch;
  rc.batches_per_epoch = t.batches_per_epoch;
  const PriceBook p = default_prices(1);
  rc.elec_da = p.elec_da[0];
  rc.gas_da = p.gas_da[0];
  rc.elec_rt_buy = p.elec_rt_buy;
  rc.elec_rt_sell = p.elec_rt_sell;
  rc.gas_rt_buy = p.gas_rt_buy;
  rc.gas_rt_sell = p.gas_rt_sell;
  rc.wind_reward = p.wind_reward;
  rc.pv_reward = p.pv_reward;
  rc.ev_reward = p.ev_reward;
  rc.tes_reward = p.tes_reward;
  return rc;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw UsageError("config line " + std::to_string(line) + ": '" + key +
                     "' expects a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& v, const std::string& key, int line) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw UsageError("config line " + std::to_string(line) + ": '" + key +
                     "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("config line " + std::to_string(line) + ": '" + key +
                   "' expects true or false, got '" + v + "'");
}

// Flat `key = value` lines; # starts a comment; unknown keys are errors.
void load_config_file(const std::string& path, RunConfig& rc) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "data_dir") rc.data_dir = val;
    else if (key == "out_dir") rc.out_dir = val;
    else if (key == "checkpoint") rc.checkpoint = val;
    else if (key == "seed") rc.seed = static_cast<std::uint64_t>(to_long(val, key, n));
    else if (key == "days") rc.days = static_cast<int>(to_long(val, key, n));
    else if (key == "pool") rc.pool = static_cast<int>(to_long(val, key, n));
    else if (key == "errors") rc.errors = static_cast<int>(to_long(val, key, n));
    else if (key == "error_cap") rc.error_cap = to_double(val, key, n);
    else if (key == "epochs") rc.epochs = static_cast<int>(to_long(val, key, n));
    else if (key == "day") rc.day = static_cast<int>(to_long(val, key, n));
    else if (key == "method") rc.method = val;
    else if (key == "large") rc.large = to_bool(val, key, n);
    else if (key == "lr") rc.lr = to_double(val, key, n);
    else if (key == "lambda") rc.lambda = to_double(val, key, n);
    else if (key == "forecast_batch") rc.forecast_batch = static_cast<int>(to_long(val, key, n));
    else if (key == "error_batch") rc.error_batch = static_cast<int>(to_long(val, key, n));
    else if (key == "batches_per_epoch")
      rc.batches_per_epoch = static_cast<int>(to_long(val, key, n));
    else if (key == "elec_da") rc.elec_da = to_double(val, key, n);
    else if (key == "gas_da") rc.gas_da = to_double(val, key, n);
    else if (key == "elec_rt_buy") rc.elec_rt_buy = to_double(val, key, n);
    else if (key == "elec_rt_sell") rc.elec_rt_sell = to_double(val, key, n);
    else if (key == "gas_rt_buy") rc.gas_rt_buy = to_double(val, key, n);
    else if (key == "gas_rt_sell") rc.gas_rt_sell = to_double(val, key, n);
    else if (key == "wind_reward") rc.wind_reward = to_double(val, key, n);
    else if (key == "pv_reward") rc.pv_reward = to_double(val, key, n);
    else if (key == "ev_reward") rc.ev_reward = to_double(val, key, n);
    else if (key == "tes_reward") rc.tes_reward = to_double(val, key, n);
    else
      throw UsageError("config line " + std::to_string(n) + ": unknown key '" + key + "'");
  }
}

SystemConfig system_for(const RunConfig& rc) {
  return rc.large ? large_system() : default_system();
}

PriceBook prices_for(const RunConfig& rc, int slots) {
  PriceBook p = default_prices(slots);
  p.elec_da = Vec::Constant(slots, rc.elec_da);
  p.gas_da = Vec::Constant(slots, rc.gas_da);
  p.elec_rt_buy = rc.elec_rt_buy;
  p.elec_rt_sell = rc.elec_rt_sell;
  p.gas_rt_buy = rc.gas_rt_buy;
  p.gas_rt_sell = rc.gas_rt_sell;
  p.wind_reward = rc.wind_reward;
  p.pv_reward = rc.pv_reward;
  p.ev_reward = rc.ev_reward;
  p.tes_reward = rc.tes_reward;
  return p;
}

std::string checkpoint_path(const RunConfig& rc) {
  return rc.checkpoint.empty() ? rc.out_dir + "/checkpoint_best.txt" : rc.checkpoint;
}

Method parse_method(const std::string& m) {
  if (m == "neural") return Method::Neural;
  if (m == "benchmark") return Method::Benchmark;
  if (m == "ideal") return Method::Ideal;
  throw UsageError("unknown method '" + m + "' (expected neural, benchmark or ideal)");
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw DataError("write to " + path + " failed");
}

std::vector<DayProfile> eval_days(const RunConfig& rc, int slots) {
  auto base = load_profiles_csv(rc.data_dir + "/base_days.csv", slots);
  if (rc.days < static_cast<int>(base.size()))
    base.resize(static_cast<std::size_t>(std::max(rc.days, 0)));
  if (base.empty()) throw DataError("no evaluation days available");
  return base;
}

std::vector<DayProfile> actuals_for(const std::vector<DayProfile>& base,
                                    const std::vector<ErrorSample>& errs) {
  if (errs.empty()) throw DataError("error pool is empty");
  std::vector<DayProfile> out;
  out.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    out.push_back(apply_errors(base[i], errs[i % errs.size()]));
  return out;
}

int cmd_gen_data(const RunConfig& rc) {
  ProfileSpec ps = default_profiles();
  if (rc.large) ps.heat.base *= 1.2;
  ErrorSpec es = default_errors();
  es.cap = rc.error_cap;

  const auto base = generate_base_days(ps, rc.days, rc.seed);
  const auto pool = augment_forecasts(base, rc.pool, rc.seed);
  const auto errs = sample_errors(es, rc.errors, rc.seed);

  fs::create_directories(rc.data_dir);
  save_profiles_csv(rc.data_dir + "/base_days.csv", base);
  save_profiles_csv(rc.data_dir + "/forecasts.csv", pool);
  save_errors_csv(rc.data_dir + "/errors.csv", errs);

  std::string m;
  m += "mves-dataset 1\n";
  m += "seed " + std::to_string(rc.seed) + "\n";
  m += "days " + std::to_string(base.size()) + "\n";
  m += "pool " + std::to_string(pool.size()) + "\n";
  m += "errors " + std::to_string(errs.size()) + "\n";
  m += "error_cap " + num(es.cap) + "\n";
  m += "large " + std::string(rc.large ? "1" : "0") + "\n";
  m += "base_hash " + hex64(dataset_fingerprint(base, {})) + "\n";
  m += "pool_hash " + hex64(dataset_fingerprint(pool, {})) + "\n";
  m += "error_hash " + hex64(dataset_fingerprint({}, errs)) + "\n";
  write_text(rc.data_dir + "/manifest.txt", m);

  std::cout << "wrote " << base.size() << " base days, " << pool.size() << " forecasts, "
            << errs.size() << " error samples to " << rc.data_dir << "\n";
  return 0;
}

int cmd_train(const RunConfig& rc) {
  const SystemConfig c = system_for(rc);
  const PriceBook p = prices_for(rc, c.slots);
  const auto forecasts = load_profiles_csv(rc.data_dir + "/forecasts.csv", c.slots);
  const auto errs = load_errors_csv(rc.data_dir + "/errors.csv", c.slots);

  TrainConfig t;
  t.lr = rc.lr;
  t.lambda = rc.lambda;
  t.forecast_batch = rc.forecast_batch;
  t.error_batch = rc.error_batch;
  t.batches_per_epoch = rc.batches_per_epoch;
  t.epochs = rc.epochs;
  t.seed = rc.seed;

  const std::uint64_t dhash = dataset_fingerprint(forecasts, errs);
  fs::create_directories(rc.out_dir);
  const std::string latest = rc.out_dir + "/checkpoint_latest.txt";
  const std::string best = rc.out_dir + "/checkpoint_best.txt";

  NetworkParams start = init_network(c, rc.seed);
  AdamState st = AdamState::zero(start);

  if (t.epochs == 0) {
    save_checkpoint({1, 0, dhash, t, start, st}, latest);
    write_text(rc.out_dir + "/loss_trace.csv", "epoch,mean_loss\n");
    std::cout << "no epochs requested; wrote the initial state to " << latest << "\n";
    return 0;
  }

  std::string trace = "epoch,mean_loss\n";
  const auto on_epoch = [&](const EpochReport& er, const NetworkParams& np,
                            const AdamState& as) {
    save_checkpoint({1, er.epoch, dhash, t, np, as}, latest);
    if (er.best) save_checkpoint({1, er.epoch, dhash, t, np, as}, best);
    trace += std::to_string(er.epoch) + "," + num(er.mean_loss) + "\n";
    std::cout << "epoch " << er.epoch << " of " << t.epochs << ": mean loss "
              << num(er.mean_loss) << (er.best ? " (best)" : "") << "\n";
  };
  const auto on_abort = [&](const std::string& why, const NetworkParams& np,
                            const AdamState& as) {
    save_checkpoint({1, -1, dhash, t, np, as}, rc.out_dir + "/checkpoint_abort.txt");
    std::cerr << "training aborted: " << why << "\n";
  };

  const TrainResult result = train(c, p, forecasts, errs, t, std::move(start), std::move(st),
                                   on_epoch, on_abort);
  write_text(rc.out_dir + "/loss_trace.csv", trace);
  std::cout << "best epoch " << result.best_epoch << " with mean loss " << num(result.best_loss)
            << "\n";
  return 0;
}

void write_schedule_csv(const std::string& path, const SystemConfig& c, const Schedule& s) {
  std::string out = "slot,grid_kwh,gas_kwh,chp_frac,boiler_frac";
  for (int k = 0; k < c.ev.count; ++k) out += ",ev" + std::to_string(k + 1) + "_kwh";
  for (int k = 0; k < c.tes.count; ++k) out += ",tes" + std::to_string(k + 1) + "_kwh";
  out += '\n';
  for (int t = 0; t < c.slots; ++t) {
    out += std::to_string(t + 1);
    out += ',' + num(s.grid_import[t]);
    out += ',' + num(s.gas_import[t]);
    out += ',' + num(s.chp_frac[t]);
    out += ',' + num(s.boiler_frac[t]);
    for (int k = 0; k < c.ev.count; ++k) out += ',' + num(s.ev_flow(k, t));
    for (int k = 0; k < c.tes.count; ++k) out += ',' + num(s.tes_flow(k, t));
    out += '\n';
  }
  write_text(path, out);
}

int cmd_schedule(const RunConfig& rc) {
  const SystemConfig c = system_for(rc);
  const PriceBook p = prices_for(rc, c.slots);
  const auto base = load_profiles_csv(rc.data_dir + "/base_days.csv", c.slots);
  if (rc.day < 0 || rc.day >= static_cast<int>(base.size()))
    throw DataError("day " + std::to_string(rc.day) + " outside the dataset (" +
                    std::to_string(base.size()) + " days)");
  const DayProfile& forecast = base[static_cast<std::size_t>(rc.day)];
  const Method method = parse_method(rc.method);

  Schedule s;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::Benchmark:
      s = benchmark_schedule(c, forecast, p).schedule;
      break;
    case Method::Ideal: {
      const auto errs = load_errors_csv(rc.data_dir + "/errors.csv", c.slots);
      if (errs.empty()) throw DataError("error pool is empty");
      s = benchmark_schedule(c, apply_errors(forecast, errs[rc.day % errs.size()]), p).schedule;
      break;
    }
    case Method::Neural: {
      const Checkpoint ck = load_checkpoint(checkpoint_path(rc));
      s = neural_schedule(ck.params, c, forecast);
      break;
    }
  }
  const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;

  fs::create_directories(rc.out_dir);
  const std::string path = rc.out_dir + "/schedule_" + rc.method + ".csv";
  write_schedule_csv(path, c, s);

  int balance = 0, corridor = 0, other = 0;
  for (const Violation& v : check_feasibility(c, forecast, s)) {
    switch (v.kind) {
      case ViolationKind::ElecBalance:
      case ViolationKind::HeatBalance:
        ++balance;
        break;
      case ViolationKind::EvSoc:
      case ViolationKind::TesSoc:
        ++corridor;
        break;
      default:
        ++other;
    }
  }
  std::cout << "schedule for day " << rc.day << " (" << rc.method << ") written to " << path
            << "\n";
  std::cout << "computed in " << num(elapsed.count()) << " ms\n";
  std::cout << "feasibility: " << balance << " balance, " << corridor << " corridor, " << other
            << " other violations\n";
  return 0;
}

int cmd_simulate(const RunConfig& rc) {
  const SystemConfig c = system_for(rc);
  const PriceBook p = prices_for(rc, c.slots);
  const auto base = eval_days(rc, c.slots);
  const auto errs = load_errors_csv(rc.data_dir + "/errors.csv", c.slots);
  const auto actuals = actuals_for(base, errs);
  const Method method = parse_method(rc.method);

  NetworkParams net;
  if (method == Method::Neural) net = load_checkpoint(checkpoint_path(rc)).params;

  std::string daily = "day,sched,extra,penalty,adjustment,total\n";
  std::string hourly = "day,slot,cost,delta_elec,delta_gas\n";
  double total = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    Schedule s;
    switch (method) {
      case Method::Benchmark:
        s = benchmark_schedule(c, base[i], p).schedule;
        break;
      case Method::Ideal:
        s = benchmark_schedule(c, actuals[i], p).schedule;
        break;
      case Method::Neural:
        s = neural_schedule(net, c, base[i]);
        break;
    }
    const DayProfile& ref = method == Method::Ideal ? actuals[i] : base[i];
    const SettlementResult r = settle_day(c, p, s, ref, actuals[i]);
    daily += std::to_string(i + 1);
    daily += ',' + num(r.ledger.total_sched());
    daily += ',' + num(r.ledger.total_extra());
    daily += ',' + num(r.ledger.total_penalty());
    daily += ',' + num(r.ledger.adjustment);
    daily += ',' + num(r.ledger.total_all());
    daily += '\n';
    for (int t = 0; t < c.slots; ++t) {
      hourly += std::to_string(i + 1);
      hourly += ',' + std::to_string(t + 1);
      hourly += ',' + num(r.ledger.all(t));
      hourly += ',' + num(r.delta_elec[t]);
      hourly += ',' + num(r.delta_gas[t]);
      hourly += '\n';
    }
    total += r.ledger.total_all();
  }

  fs::create_directories(rc.out_dir);
  write_text(rc.out_dir + "/settlement_" + rc.method + ".csv", daily);
  write_text(rc.out_dir + "/hourly_" + rc.method + ".csv", hourly);
  std::cout << "settled " << base.size() << " days (" << rc.method << "), mean daily total "
            << num(total / static_cast<double>(base.size())) << "\n";
  return 0;
}

int cmd_report(const RunConfig& rc) {
  const SystemConfig c = system_for(rc);
  const PriceBook p = prices_for(rc, c.slots);
  const auto base = eval_days(rc, c.slots);
  const auto errs = load_errors_csv(rc.data_dir + "/errors.csv", c.slots);
  const auto actuals = actuals_for(base, errs);

  const Checkpoint ck = load_checkpoint(checkpoint_path(rc));
  ExperimentSpec spec;
  spec.methods = {Method::Ideal, Method::Neural, Method::Benchmark};
  spec.net = &ck.params;
  const EvaluationReport rep = run_experiment(c, p, base, actuals, spec);

  std::string daily = "method,day,total,extra,penalty,adjustment\n";
  std::string hourly = "method,slot,avg_cost\n";
  std::string monthly = "method,block,total\n";
  std::string cats = "method,grid,gas,ev_reward,tes_reward,renewable_reward,extra,avg_total\n";
  for (const MethodReport& mr : rep.runs) {
    const std::string name = to_string(mr.method);
    for (const DayOutcome& d : mr.days) {
      daily += name;
      daily += ',' + std::to_string(d.day + 1);
      daily += ',' + num(d.total);
      daily += ',' + num(d.extra);
      daily += ',' + num(d.penalty);
      daily += ',' + num(d.adjustment);
      daily += '\n';
    }
    for (int t = 0; t < c.slots; ++t)
      hourly += name + ',' + std::to_string(t + 1) + ',' + num(mr.hourly_avg[t]) + '\n';
    for (std::size_t b = 0; b < mr.monthly_total.size(); ++b)
      monthly += name + ',' + std::to_string(b + 1) + ',' + num(mr.monthly_total[b]) + '\n';
    cats += name;
    cats += ',' + num(mr.avg_parts.grid);
    cats += ',' + num(mr.avg_parts.gas);
    cats += ',' + num(mr.avg_parts.ev_reward);
    cats += ',' + num(mr.avg_parts.tes_reward);
    cats += ',' + num(mr.avg_parts.renewable_reward);
    cats += ',' + num(mr.avg_extra);
    cats += ',' + num(mr.avg_total);
    cats += '\n';
  }

  std::string cmp = "metric,method,value\n";
  for (const MethodReport& mr : rep.runs) {
    cmp += "avg_daily_total," + std::string(to_string(mr.method)) + ',' + num(mr.avg_total) + '\n';
    cmp += "avg_daily_extra," + std::string(to_string(mr.method)) + ',' + num(mr.avg_extra) + '\n';
    cmp += "adjustment_total," + std::string(to_string(mr.method)) + ',' +
           num(mr.adjustment_total) + '\n';
  }
  const double reduction = rep.extra_cost_reduction();
  cmp += "extra_cost_reduction,neural," + num(reduction) + '\n';

  fs::create_directories(rc.out_dir);
  write_text(rc.out_dir + "/report_daily.csv", daily);
  write_text(rc.out_dir + "/report_hourly.csv", hourly);
  write_text(rc.out_dir + "/report_monthly.csv", monthly);
  write_text(rc.out_dir + "/report_categories.csv", cats);
  write_text(rc.out_dir + "/report_comparison.csv", cmp);

  for (const MethodReport& mr : rep.runs)
    std::cout << to_string(mr.method) << " avg daily total " << num(mr.avg_total) << ", extra "
              << num(mr.avg_extra) << "\n";
  std::cout << "extra-cost reduction " << num(reduction * 100.0) << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"day-ahead scheduling toolkit for a multi-vector energy system"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs, days, pool, day;
  std::optional<double> error_cap;
  std::optional<std::string> method, out;
  bool large = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file with key = value lines");
    sub->add_option("--seed", seed, "random stream selector");
    sub->add_option("--method", method, "neural, benchmark or ideal");
    sub->add_option("--epochs", epochs, "training epochs");
    sub->add_option("--days", days, "number of days");
    sub->add_option("--pool", pool, "augmented forecast pool size");
    sub->add_option("--error-cap", error_cap, "hard bound on relative forecast error");
    sub->add_option("--day", day, "day index for the schedule command");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--large", large, "six vehicles, four heat stores, heavier heat demand");
  };

  CLI::App* c_gen = app.add_subcommand("gen-data", "generate day profiles and error pools");
  CLI::App* c_train = app.add_subcommand("train", "fit the scheduling network");
  CLI::App* c_sched = app.add_subcommand("schedule", "produce one day-ahead schedule");
  CLI::App* c_sim = app.add_subcommand("simulate", "settle scheduled days against actuals");
  CLI::App* c_rep = app.add_subcommand("report", "compare methods and aggregate costs");
  for (CLI::App* sub : {c_gen, c_train, c_sched, c_sim, c_rep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig rc = default_run_config();
    if (!config_path.empty()) load_config_file(config_path, rc);
    if (seed) rc.seed = *seed;
    if (epochs) rc.epochs = *epochs;
    if (days) rc.days = *days;
    if (pool) rc.pool = *pool;
    if (day) rc.day = *day;
    if (error_cap) rc.error_cap = *error_cap;
    if (method) rc.method = *method;
    if (large) rc.large = true;
    if (out) {
      rc.out_dir = *out;
      // data generation's output is the dataset itself
      if (c_gen->parsed()) rc.data_dir = *out;
    }
    if (rc.days <= 0) throw UsageError("--days must be positive");
    if (rc.pool < 0 || rc.errors < 0) throw UsageError("pool sizes must be nonnegative");
    parse_method(rc.method);  // reject typos before touching any file

    if (c_gen->parsed()) return cmd_gen_data(rc);
    if (c_train->parsed()) return cmd_train(rc);
    if (c_sched->parsed()) return cmd_schedule(rc);
    if (c_sim->parsed()) return cmd_simulate(rc);
    if (c_rep->parsed()) return cmd_report(rc);
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const ScheduleError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
