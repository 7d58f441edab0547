#include "mves/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mves {
namespace {

constexpr const char* kProfileHeader = "day,slot,L_E_kwh,L_H_kwh,S_W_kwh,S_PV_kwh";
constexpr const char* kErrorHeader = "day,slot,delta_E,delta_H,delta_W,delta_PV";

void put_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

[[noreturn]] void fail_at(const std::string& path, int line, const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw DataError(os.str());
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

long parse_int(const std::string& path, int line, const std::string& cell) {
  long v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    fail_at(path, line, "expected an integer, got '" + cell + "'");
  return v;
}

double parse_double(const std::string& path, int line, const std::string& cell) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    fail_at(path, line, "expected a number, got '" + cell + "'");
  if (!std::isfinite(v)) fail_at(path, line, "non-finite value '" + cell + "'");
  return v;
}

using Row = std::array<double, 4>;

// Shared reader: header line, then day/slot keyed rows in strict order.
std::vector<std::vector<Row>> load_rows(const std::string& path, const char* header,
                                        int slots) {
  if (slots <= 0) throw DataError("expected slot count must be positive");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    fail_at(path, line_no, "expected header '" + std::string(header) + "', got '" + line + "'");

  std::vector<std::vector<Row>> days;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_fields(line);
    if (cells.size() != 6) {
      std::ostringstream os;
      os << "expected 6 columns, got " << cells.size();
      fail_at(path, line_no, os.str());
    }
    const long day = parse_int(path, line_no, cells[0]);
    const long slot = parse_int(path, line_no, cells[1]);
    const long expect_day = static_cast<long>(days.size()) +
                            (days.empty() || static_cast<int>(days.back().size()) == slots ? 1 : 0);
    if (day != expect_day) {
      std::ostringstream os;
      if (!days.empty() && static_cast<int>(days.back().size()) < slots && day == expect_day + 1) {
        os << "day " << expect_day << " has only " << days.back().size() << " slots, expected "
           << slots;
      } else {
        os << "expected day " << expect_day << ", got " << day;
      }
      fail_at(path, line_no, os.str());
    }
    if (days.empty() || static_cast<int>(days.back().size()) == slots) days.emplace_back();
    const long expect_slot = static_cast<long>(days.back().size()) + 1;
    if (slot != expect_slot) {
      std::ostringstream os;
      os << "expected slot " << expect_slot << " of day " << day << ", got " << slot;
      fail_at(path, line_no, os.str());
    }
    Row r;
    for (int k = 0; k < 4; ++k) r[k] = parse_double(path, line_no, cells[2 + k]);
    days.back().push_back(r);
  }
  if (!days.empty() && static_cast<int>(days.back().size()) != slots) {
    std::ostringstream os;
    os << path << ": day " << days.size() << " has only " << days.back().size()
       << " slots, expected " << slots;
    throw DataError(os.str());
  }
  return days;
}

void save_rows(const std::string& path, const char* header,
               const std::vector<std::array<const Vec*, 4>>& days) {
  std::string out;
  out.reserve(days.size() * 24 * 64 + 64);
  out += header;
  out += '\n';
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& cols = days[d];
    for (Eigen::Index t = 0; t < cols[0]->size(); ++t) {
      out += std::to_string(d + 1);
      out += ',';
      out += std::to_string(t + 1);
      for (int k = 0; k < 4; ++k) {
        out += ',';
        put_number(out, (*cols[k])[t]);
      }
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write to " + path + " failed");
}

}  // namespace

void save_profiles_csv(const std::string& path, const std::vector<DayProfile>& days) {
  std::vector<std::array<const Vec*, 4>> rows;
  rows.reserve(days.size());
  for (const auto& d : days) rows.push_back({&d.elec_load, &d.heat_load, &d.wind, &d.pv});
  save_rows(path, kProfileHeader, rows);
}

std::vector<DayProfile> load_profiles_csv(const std::string& path, int slots) {
  const auto raw = load_rows(path, kProfileHeader, slots);
  std::vector<DayProfile> out;
  out.reserve(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    DayProfile p;
    p.elec_load = Vec(slots);
    p.heat_load = Vec(slots);
    p.wind = Vec(slots);
    p.pv = Vec(slots);
    for (int t = 0; t < slots; ++t) {
      for (double v : raw[d][static_cast<std::size_t>(t)]) {
        if (v < 0.0) {
          std::ostringstream os;
          os << path << ": day " << d + 1 << " slot " << t + 1 << " has a negative value";
          throw DataError(os.str());
        }
      }
      p.elec_load[t] = raw[d][static_cast<std::size_t>(t)][0];
      p.heat_load[t] = raw[d][static_cast<std::size_t>(t)][1];
      p.wind[t] = raw[d][static_cast<std::size_t>(t)][2];
      p.pv[t] = raw[d][static_cast<std::size_t>(t)][3];
    }
    out.push_back(std::move(p));
  }
  return out;
}

void save_errors_csv(const std::string& path, const std::vector<ErrorSample>& errors) {
  std::vector<std::array<const Vec*, 4>> rows;
  rows.reserve(errors.size());
  for (const auto& e : errors) rows.push_back({&e.elec, &e.heat, &e.wind, &e.pv});
  save_rows(path, kErrorHeader, rows);
}

std::vector<ErrorSample> load_errors_csv(const std::string& path, int slots) {
  const auto raw = load_rows(path, kErrorHeader, slots);
  std::vector<ErrorSample> out;
  out.reserve(raw.size());
  for (const auto& day : raw) {
    ErrorSample e;
    e.elec = Vec(slots);
    e.heat = Vec(slots);
    e.wind = Vec(slots);
    e.pv = Vec(slots);
    for (int t = 0; t < slots; ++t) {
      e.elec[t] = day[static_cast<std::size_t>(t)][0];
      e.heat[t] = day[static_cast<std::size_t>(t)][1];
      e.wind[t] = day[static_cast<std::size_t>(t)][2];
      e.pv[t] = day[static_cast<std::size_t>(t)][3];
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mves
