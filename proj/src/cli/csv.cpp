#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "inavm/cli.hpp"

namespace inavm::cli {

namespace {

const char* const kImuHeader = "t_end,dthx,dthy,dthz,dvx,dvy,dvz";
const char* const kTruthHeader = "t,qs,qx,qy,qz,vx,vy,vz,px,py,pz";
const char* const kNavHeader = "t,qs,qx,qy,qz,vx,vy,vz,px,py,pz,iters,e_q,e_v,e_p";
const char* const kErrorHeader = "t,angle,vn,vu,ve,pos_we,pos_ns,pos_h";

std::string where(const std::string& name, int line) { return name + ":" + std::to_string(line) + ": "; }

// Reads header plus rows of exactly `cols` finite numbers.
std::vector<std::vector<double>> read_table(std::istream& is, const std::string& name, const char* header,
                                            std::size_t cols) {
  std::string line;
  if (!std::getline(is, line)) throw CliError(where(name, 1) + "empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw CliError(where(name, 1) + "expected header '" + header + "'");

  std::vector<std::vector<double>> rows;
  for (int no = 2; std::getline(is, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(cols);
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      double x = 0.0;
      const auto r = std::from_chars(p, end, x);
      if (r.ec != std::errc() || !std::isfinite(x)) {
        throw CliError(where(name, no) + "field " + std::to_string(row.size() + 1) + " is not a finite number");
      }
      row.push_back(x);
      p = r.ptr;
      if (p == end) break;
      if (*p != ',') throw CliError(where(name, no) + "unexpected character in field " + std::to_string(row.size()));
      ++p;
    }
    if (row.size() != cols) {
      throw CliError(where(name, no) + "expected " + std::to_string(cols) + " fields, got " +
                     std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void put(std::ostream& os, double x) { os << format_number(x); }

void put_row(std::ostream& os, std::initializer_list<double> xs) {
  bool first = true;
  for (double x : xs) {
    if (!first) os << ',';
    put(os, x);
    first = false;
  }
}

void put_state(std::ostream& os, const NavState& s) {
  put_row(os, {s.t, s.q.s, s.q.eta.x(), s.q.eta.y(), s.q.eta.z(), s.v_e.x(), s.v_e.y(), s.v_e.z(), s.p_e.x(),
               s.p_e.y(), s.p_e.z()});
}

NavState get_state(const std::vector<double>& r) {
  NavState s;
  s.t = r[0];
  s.q = Quaternion(r[1], r[2], r[3], r[4]);
  s.v_e = Vec3(r[5], r[6], r[7]);
  s.p_e = Vec3(r[8], r[9], r[10]);
  return s;
}

template <typename Fn>
auto with_file(const std::string& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open '" + path + "'");
  return fn(in);
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_imu_csv(std::ostream& os, const ImuStream& imu) {
  os << kImuHeader << '\n';
  for (std::size_t k = 0; k < imu.size(); ++k) {
    const Vec3& a = imu.dtheta[k];
    const Vec3& b = imu.dv[k];
    put_row(os, {imu.t_end[k], a.x(), a.y(), a.z(), b.x(), b.y(), b.z()});
    os << '\n';
  }
}

ImuStream read_imu_csv(std::istream& is, const std::string& name) {
  const auto rows = read_table(is, name, kImuHeader, 7);
  ImuStream imu;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (k > 0 && !(r[0] > imu.t_end.back())) {
      throw CliError(where(name, static_cast<int>(k) + 2) + "t_end must increase");
    }
    imu.t_end.push_back(r[0]);
    imu.dtheta.emplace_back(r[1], r[2], r[3]);
    imu.dv.emplace_back(r[4], r[5], r[6]);
  }
  return imu;
}

void write_truth_csv(std::ostream& os, const std::vector<NavState>& rows) {
  os << kTruthHeader << '\n';
  for (const NavState& s : rows) {
    put_state(os, s);
    os << '\n';
  }
}

std::vector<NavState> read_truth_csv(std::istream& is, const std::string& name) {
  std::vector<NavState> out;
  for (const auto& r : read_table(is, name, kTruthHeader, 11)) out.push_back(get_state(r));
  return out;
}

void write_nav_csv(std::ostream& os, const std::vector<NavRow>& rows) {
  os << kNavHeader << '\n';
  for (const NavRow& r : rows) {
    put_state(os, r.state);
    os << ',' << r.iters << ',';
    put_row(os, {r.e_q, r.e_v, r.e_p});
    os << '\n';
  }
}

std::vector<NavRow> read_nav_csv(std::istream& is, const std::string& name) {
  std::vector<NavRow> out;
  int no = 2;
  for (const auto& r : read_table(is, name, kNavHeader, 15)) {
    NavRow row;
    row.state = get_state(r);
    if (r[11] != std::floor(r[11]) || r[11] < 0) throw CliError(where(name, no) + "iters must be a whole number");
    row.iters = static_cast<int>(r[11]);
    row.e_q = r[12];
    row.e_v = r[13];
    row.e_p = r[14];
    out.push_back(row);
    ++no;
  }
  return out;
}

void write_error_csv(std::ostream& os, const std::vector<ErrorRecord>& rows) {
  os << kErrorHeader << '\n';
  for (const ErrorRecord& e : rows) {
    put_row(os, {e.t, e.angle, e.vel_n.x(), e.vel_n.y(), e.vel_n.z(), e.pos_h.x(), e.pos_h.y(), e.pos_h.z()});
    os << '\n';
  }
}

ImuStream read_imu_file(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_imu_csv(in, path); });
}

std::vector<NavState> read_truth_file(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_truth_csv(in, path); });
}

std::vector<NavRow> read_nav_file(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_nav_csv(in, path); });
}

}  // namespace inavm::cli
