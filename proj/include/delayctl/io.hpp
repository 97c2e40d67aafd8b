#pragma once

#include <ostream>
#include <string>

#include "delayctl/dynamics.hpp"

namespace delayctl {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

/// Column layout: `t,x_1..x_n,u_1..u_m,w_1..w_m,norm` with the u/w blocks
/// present only when the trajectory recorded them; norm = |x| + |w|.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Reads an input history table `theta,u_1..u_m` sampled on a uniform grid
/// covering [-r, 0] (a header line is skipped if present).
HistorySegment read_history_csv(const std::string& path, double r);

}  // namespace delayctl
