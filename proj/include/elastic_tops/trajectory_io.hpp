#pragma once

#include <iosfwd>
#include <string>

#include "elastic_tops/lie_dynamics.hpp"

namespace etop::lie {

/// Header `t,h1,h2,h3,H1,H2,H3[,g00..g33][,H,K2,K3,K4sq,F1,F2,F3]`. Frame
/// columns appear when the trajectory carries frames; K4sq and F columns when
/// every sample has them.
std::string csv_header(const Trajectory& traj);

/// Writes the trajectory with 17 significant digits per value.
void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);

}  // namespace etop::lie
