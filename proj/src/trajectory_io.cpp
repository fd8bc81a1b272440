#include "elastic_tops/trajectory_io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace etop::lie {

namespace {

bool all_have_k4(const Trajectory& traj) {
  if (traj.invariants.empty()) return false;
  for (const auto& q : traj.invariants) {
    if (!q.K4sq) return false;
  }
  return true;
}

bool all_have_f(const Trajectory& traj) {
  if (traj.invariants.empty()) return false;
  for (const auto& q : traj.invariants) {
    if (!q.F) return false;
  }
  return true;
}

}  // namespace

std::string csv_header(const Trajectory& traj) {
  std::string h = "t,h1,h2,h3,H1,H2,H3";
  if (traj.has_frames()) {
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) h += ",g" + std::to_string(r) + std::to_string(c);
    }
  }
  h += ",H,K2,K3";
  if (all_have_k4(traj)) h += ",K4sq";
  if (all_have_f(traj)) h += ",F1,F2,F3";
  return h;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  traj.check();
  const bool k4 = all_have_k4(traj);
  const bool f = all_have_f(traj);
  const auto old_precision = out.precision(17);
  out << csv_header(traj) << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& s = traj.states[i];
    out << traj.t[i];
    for (int j = 0; j < 3; ++j) out << ',' << s.h(j);
    for (int j = 0; j < 3; ++j) out << ',' << s.H(j);
    if (traj.has_frames()) {
      const Mat4& g = traj.frames[i];
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) out << ',' << g(r, c);
      }
    }
    const Invariants& q = traj.invariants[i];
    out << ',' << q.H << ',' << q.K2 << ',' << q.K3;
    if (k4) out << ',' << *q.K4sq;
    if (f) out << ',' << (*q.F)(0) << ',' << (*q.F)(1) << ',' << (*q.F)(2);
    out << '\n';
  }
  out.precision(old_precision);
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, traj);
}

}  // namespace etop::lie
