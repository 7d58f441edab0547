#include "mves/network.hpp"

#include <cmath>

#include "mves/rng.hpp"

namespace mves {

NetworkDims network_dims(const SystemConfig& c) {
  NetworkDims d;
  d.input = 4 * c.slots;
  d.output = (3 + c.ev.count + c.tes.count) * c.slots;
  return d;
}

int64_t NetworkParams::parameter_count() const {
  int64_t n = 0;
  for (const Mat& m : w) n += m.size();
  for (const Vec& v : b) n += v.size();
  return n;
}

NetworkParams init_network(const NetworkDims& dims, const Vec& input_scale, std::uint64_t seed) {
  NetworkParams p;
  p.dims = dims;
  const std::vector<int> chain = dims.chain();
  Rng rng(mix_seed(seed, 0x6e657477));
  for (size_t l = 0; l + 1 < chain.size(); ++l) {
    const int fan_in = chain[l];
    const int fan_out = chain[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Mat w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-bound, bound);
    Vec b(fan_out);
    for (int i = 0; i < fan_out; ++i) b[i] = rng.uniform(-bound, bound);
    p.w.push_back(std::move(w));
    p.b.push_back(std::move(b));
  }
  p.input_scale = input_scale;
  validate(p);
  return p;
}

NetworkParams init_network(const SystemConfig& c, std::uint64_t seed) {
  const NetworkDims dims = network_dims(c);
  Vec scale = Vec::Ones(dims.input);
  const int T = c.slots;
  const double caps[4] = {c.grid_max, c.boiler_gas_max * c.boiler_eff, c.wind_max, c.pv_max};
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < T; ++t) scale[s * T + t] = caps[s];
  return init_network(dims, scale, seed);
}

void validate(const NetworkParams& p) {
  const std::vector<int> chain = p.dims.chain();
  if (p.w.size() != chain.size() - 1 || p.b.size() != chain.size() - 1)
    throw DataError("network: layer count does not match the dimension chain");
  for (size_t l = 0; l + 1 < chain.size(); ++l) {
    if (p.w[l].rows() != chain[l + 1] || p.w[l].cols() != chain[l])
      throw DataError("network: weight shape mismatch at layer " + std::to_string(l));
    if (p.b[l].size() != chain[l + 1])
      throw DataError("network: bias length mismatch at layer " + std::to_string(l));
    if (!p.w[l].allFinite() || !p.b[l].allFinite())
      throw DataError("network: non-finite parameter at layer " + std::to_string(l));
  }
  if (p.input_scale.size() != p.dims.input)
    throw DataError("network: input_scale length mismatch");
  if (p.input_scale.minCoeff() <= 0.0) throw DataError("network: input_scale must be positive");
}

Vec flatten_forecast(const DayProfile& f) {
  const int T = static_cast<int>(f.elec_load.size());
  Vec x(4 * T);
  x.segment(0, T) = f.elec_load;
  x.segment(T, T) = f.heat_load;
  x.segment(2 * T, T) = f.wind;
  x.segment(3 * T, T) = f.pv;
  return x;
}

Vec forward_raw(const NetworkParams& p, const Vec& input, ForwardCache* cache) {
  if (input.size() != p.dims.input) throw DataError("network: input length mismatch");
  const size_t layers = p.w.size();
  Vec a = input.cwiseQuotient(p.input_scale);
  if (cache) {
    cache->input_norm = a;
    cache->pre.assign(layers, Vec());
    cache->post.assign(layers, Vec());
  }
  for (size_t l = 0; l < layers; ++l) {
    Vec z = p.w[l] * a + p.b[l];
    if (l + 1 < layers) {
      a = z.unaryExpr([s = p.prelu_slope](double x) { return x >= 0.0 ? x : s * x; });
    } else {
      a = z;
    }
    if (cache) {
      cache->pre[l] = std::move(z);
      cache->post[l] = a;
    }
  }
  return a;
}

NetworkGrad NetworkGrad::zero(const NetworkParams& p) {
  NetworkGrad g;
  for (const Mat& m : p.w) g.w.push_back(Mat::Zero(m.rows(), m.cols()));
  for (const Vec& v : p.b) g.b.push_back(Vec::Zero(v.size()));
  return g;
}

void NetworkGrad::add_scaled(const NetworkGrad& o, double f) {
  for (size_t l = 0; l < w.size(); ++l) {
    w[l] += f * o.w[l];
    b[l] += f * o.b[l];
  }
}

void NetworkGrad::scale(double f) {
  for (size_t l = 0; l < w.size(); ++l) {
    w[l] *= f;
    b[l] *= f;
  }
}

double NetworkGrad::max_abs() const {
  double worst = 0.0;
  for (const Mat& m : w) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  for (const Vec& v : b) worst = std::max(worst, v.cwiseAbs().maxCoeff());
  return worst;
}

void backward_raw(const NetworkParams& p, const ForwardCache& cache, const Vec& d_out,
                  NetworkGrad& acc) {
  const size_t layers = p.w.size();
  if (d_out.size() != p.dims.output) throw DataError("network: output gradient length mismatch");
  Vec d = d_out;
  for (size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) {
      // slope 1 on the nonnegative side, including exactly zero
      d = d.cwiseProduct(cache.pre[l].unaryExpr(
          [s = p.prelu_slope](double x) { return x >= 0.0 ? 1.0 : s; }));
    }
    const Vec& below = l == 0 ? cache.input_norm : cache.post[l - 1];
    acc.w[l] += d * below.transpose();
    acc.b[l] += d;
    if (l > 0) d = p.w[l].transpose() * d;
  }
}

}  // namespace mves
