#include "mves/checkpoint.hpp"

#include <cctype>
#include <charconv>
#include <fstream>

namespace mves {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::uint64_t fnv1a_vec(const Vec& v, std::uint64_t h) {
  return fnv1a(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), h);
}

}  // namespace

std::uint64_t dataset_fingerprint(const std::vector<DayProfile>& days,
                                  const std::vector<ErrorSample>& errors) {
  std::uint64_t h = 14695981039346656037ULL;
  const std::uint64_t counts[2] = {days.size(), errors.size()};
  h = fnv1a(counts, sizeof counts, h);
  for (const DayProfile& d : days) {
    h = fnv1a_vec(d.elec_load, h);
    h = fnv1a_vec(d.heat_load, h);
    h = fnv1a_vec(d.wind, h);
    h = fnv1a_vec(d.pv, h);
  }
  for (const ErrorSample& e : errors) {
    h = fnv1a_vec(e.elec, h);
    h = fnv1a_vec(e.heat, h);
    h = fnv1a_vec(e.wind, h);
    h = fnv1a_vec(e.pv, h);
  }
  return h;
}

namespace {

void put_num(std::string& out, double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void put_num(std::string& out, std::int64_t v) {
  char buf[24];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void put_hex(std::string& out, std::uint64_t v) {
  char buf[20];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
  out.append(buf, r.ptr);
}

void put_vec(std::string& out, const char* label, const Vec& v) {
  out += label;
  out += ' ';
  put_num(out, static_cast<std::int64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += i % 8 == 0 ? '\n' : ' ';
    put_num(out, v[i]);
  }
  out += '\n';
}

void put_mat(std::string& out, const char* label, const Mat& m) {
  out += label;
  out += ' ';
  put_num(out, static_cast<std::int64_t>(m.rows()));
  out += ' ';
  put_num(out, static_cast<std::int64_t>(m.cols()));
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      put_num(out, m(i, j));
    }
    out += '\n';
  }
}

struct TokenReader {
  const std::string& text;
  std::size_t pos = 0;

  std::string_view next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) throw DataError("checkpoint: truncated file");
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return std::string_view(text).substr(start, pos - start);
  }

  void expect(std::string_view label) {
    const std::string_view got = next();
    if (got != label)
      throw DataError("checkpoint: expected '" + std::string(label) + "', found '" +
                      std::string(got) + "'");
  }

  double num() {
    const std::string_view t = next();
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw DataError("checkpoint: bad number '" + std::string(t) + "'");
    return v;
  }

  std::int64_t integer() {
    const std::string_view t = next();
    std::int64_t v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw DataError("checkpoint: bad integer '" + std::string(t) + "'");
    return v;
  }

  std::uint64_t hex() {
    const std::string_view t = next();
    std::uint64_t v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v, 16);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw DataError("checkpoint: bad hash '" + std::string(t) + "'");
    return v;
  }

  Vec vec(const char* label) {
    expect(label);
    const std::int64_t n = integer();
    if (n < 0) throw DataError("checkpoint: negative vector length");
    Vec v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = num();
    return v;
  }

  Mat mat(const char* label) {
    expect(label);
    const std::int64_t rows = integer();
    const std::int64_t cols = integer();
    if (rows < 0 || cols < 0) throw DataError("checkpoint: negative matrix shape");
    Mat m(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i)
      for (std::int64_t j = 0; j < cols; ++j) m(i, j) = num();
    return m;
  }
};

std::string layer_label(const char* stem, std::size_t l) {
  return stem + std::to_string(l);
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  validate(ck.params);
  std::string out;
  out.reserve(64u << 20);
  out += "mves-net ";
  put_num(out, static_cast<std::int64_t>(ck.version));
  out += "\nepoch ";
  put_num(out, static_cast<std::int64_t>(ck.epoch));
  out += "\nstep ";
  put_num(out, ck.state.step);
  out += "\ndataset ";
  put_hex(out, ck.dataset_hash);
  out += "\nseed ";
  put_hex(out, ck.train.seed);
  out += "\nlr ";
  put_num(out, ck.train.lr);
  out += " lambda ";
  put_num(out, ck.train.lambda);
  out += " beta1 ";
  put_num(out, ck.train.beta1);
  out += " beta2 ";
  put_num(out, ck.train.beta2);
  out += " eps ";
  put_num(out, ck.train.eps);
  out += "\nbatches ";
  put_num(out, static_cast<std::int64_t>(ck.train.forecast_batch));
  out += ' ';
  put_num(out, static_cast<std::int64_t>(ck.train.error_batch));
  out += ' ';
  put_num(out, static_cast<std::int64_t>(ck.train.batches_per_epoch));
  out += ' ';
  put_num(out, static_cast<std::int64_t>(ck.train.epochs));
  out += "\nprelu ";
  put_num(out, ck.params.prelu_slope);
  out += "\ndims";
  for (int d : ck.params.dims.chain()) {
    out += ' ';
    put_num(out, static_cast<std::int64_t>(d));
  }
  out += '\n';
  put_vec(out, "scale", ck.params.input_scale);
  for (std::size_t l = 0; l < ck.params.w.size(); ++l) {
    put_mat(out, layer_label("w", l).c_str(), ck.params.w[l]);
    put_vec(out, layer_label("b", l).c_str(), ck.params.b[l]);
  }
  for (std::size_t l = 0; l < ck.state.m.w.size(); ++l) {
    put_mat(out, layer_label("mw", l).c_str(), ck.state.m.w[l]);
    put_vec(out, layer_label("mb", l).c_str(), ck.state.m.b[l]);
    put_mat(out, layer_label("vw", l).c_str(), ck.state.v.w[l]);
    put_vec(out, layer_label("vb", l).c_str(), ck.state.v.b[l]);
  }
  out += "end\n";

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("checkpoint: cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("checkpoint: short write to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("checkpoint: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  TokenReader r{text};
  Checkpoint ck;
  r.expect("mves-net");
  ck.version = static_cast<int>(r.integer());
  if (ck.version != 1)
    throw DataError("checkpoint: unsupported version " + std::to_string(ck.version));
  r.expect("epoch");
  ck.epoch = static_cast<int>(r.integer());
  r.expect("step");
  ck.state.step = r.integer();
  r.expect("dataset");
  ck.dataset_hash = r.hex();
  r.expect("seed");
  ck.train.seed = r.hex();
  r.expect("lr");
  ck.train.lr = r.num();
  r.expect("lambda");
  ck.train.lambda = r.num();
  r.expect("beta1");
  ck.train.beta1 = r.num();
  r.expect("beta2");
  ck.train.beta2 = r.num();
  r.expect("eps");
  ck.train.eps = r.num();
  r.expect("batches");
  ck.train.forecast_batch = static_cast<int>(r.integer());
  ck.train.error_batch = static_cast<int>(r.integer());
  ck.train.batches_per_epoch = static_cast<int>(r.integer());
  ck.train.epochs = static_cast<int>(r.integer());
  r.expect("prelu");
  ck.params.prelu_slope = r.num();
  r.expect("dims");
  ck.params.dims.input = static_cast<int>(r.integer());
  for (int i = 0; i < 3; ++i) ck.params.dims.hidden[i] = static_cast<int>(r.integer());
  ck.params.dims.output = static_cast<int>(r.integer());
  ck.params.input_scale = r.vec("scale");
  const std::size_t layers = ck.params.dims.chain().size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    ck.params.w.push_back(r.mat(layer_label("w", l).c_str()));
    ck.params.b.push_back(r.vec(layer_label("b", l).c_str()));
  }
  for (std::size_t l = 0; l < layers; ++l) {
    ck.state.m.w.push_back(r.mat(layer_label("mw", l).c_str()));
    ck.state.m.b.push_back(r.vec(layer_label("mb", l).c_str()));
    ck.state.v.w.push_back(r.mat(layer_label("vw", l).c_str()));
    ck.state.v.b.push_back(r.vec(layer_label("vb", l).c_str()));
  }
  r.expect("end");
  validate(ck.params);
  for (std::size_t l = 0; l < layers; ++l) {
    if (ck.state.m.w[l].rows() != ck.params.w[l].rows() ||
        ck.state.m.w[l].cols() != ck.params.w[l].cols() ||
        ck.state.v.w[l].rows() != ck.params.w[l].rows() ||
        ck.state.m.b[l].size() != ck.params.b[l].size() ||
        ck.state.v.b[l].size() != ck.params.b[l].size())
      throw DataError("checkpoint: optimizer moment shapes do not match the parameters");
  }
  return ck;
}

}  // namespace mves
