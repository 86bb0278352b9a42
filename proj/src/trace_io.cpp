#include "dchier/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dchier {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

std::string trace_header(Index dofs) {
  std::string h = "t";
  for (Index i = 1; i <= dofs; ++i) h += ",q" + std::to_string(i);
  h += ",x,y,z,vx,vy,vz,vax,vay,vaz,fx,fy,fz,angle_dev_deg,eta,s,blocked,sat_rows";
  return h;
}

void write_trace_csv(std::ostream& out, const TraceLog& trace) {
  out << trace_header(trace.dofs) << '\n';
  for (const TraceRow& r : trace.rows) {
    put(out, r.t);
    for (Index i = 0; i < r.q.size(); ++i) {
      out << ',';
      put(out, r.q(i));
    }
    for (const Vec3* v : {&r.x, &r.v, &r.v_a, &r.f}) {
      for (Index i = 0; i < 3; ++i) {
        out << ',';
        put(out, (*v)(i));
      }
    }
    out << ',';
    put(out, r.angle_dev_deg);
    out << ',';
    put(out, r.eta);
    out << ',';
    put(out, r.s);
    out << ',' << (r.blocked ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.sat_rows.size(); ++i) out << (i ? ";" : "") << r.sat_rows[i];
    out << '\n';
  }
}

std::string trace_csv(const TraceLog& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dchier
