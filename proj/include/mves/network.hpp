#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mves/types.hpp"

namespace mves {

// Four affine layers; a leaky rectifier follows the first three, the last
// stays raw. Input is the four forecast series back to back, output is one
// channel block per schedule quantity.
struct NetworkDims {
  int input = 0;
  std::array<int, 3> hidden = {768, 576, 384};
  int output = 0;

  std::vector<int> chain() const { return {input, hidden[0], hidden[1], hidden[2], output}; }
};

NetworkDims network_dims(const SystemConfig& c);

struct NetworkParams {
  NetworkDims dims;
  std::vector<Mat> w;  // w[l]: chain[l+1] x chain[l]
  std::vector<Vec> b;
  double prelu_slope = 0.25;
  Vec input_scale;  // per entry divisor applied before the first layer

  int64_t parameter_count() const;
};

// Weights and biases drawn uniformly in +-1/sqrt(fan_in), layer by layer,
// weights row-major before the bias. input_scale carries the series caps so a
// checkpoint stays self-contained.
NetworkParams init_network(const SystemConfig& c, std::uint64_t seed);
NetworkParams init_network(const NetworkDims& dims, const Vec& input_scale, std::uint64_t seed);

void validate(const NetworkParams& p);

// [elec | heat | wind | pv], kWh, unnormalized
Vec flatten_forecast(const DayProfile& f);

struct ForwardCache {
  Vec input_norm;
  std::vector<Vec> pre;   // affine outputs, one per layer
  std::vector<Vec> post;  // after activation; post.back() == pre.back()
};

// The rectifier keeps slope 1 at exactly zero.
Vec forward_raw(const NetworkParams& p, const Vec& input, ForwardCache* cache = nullptr);

struct NetworkGrad {
  std::vector<Mat> w;
  std::vector<Vec> b;

  static NetworkGrad zero(const NetworkParams& p);
  void add_scaled(const NetworkGrad& o, double f);
  void scale(double f);
  double max_abs() const;
};

// Accumulates d(loss)/d(params) into acc given d(loss)/d(raw output).
void backward_raw(const NetworkParams& p, const ForwardCache& cache, const Vec& d_out,
                  NetworkGrad& acc);

}  // namespace mves
