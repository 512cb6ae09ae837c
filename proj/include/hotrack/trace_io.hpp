#pragma once

#include <string>

#include "hotrack/sim.hpp"

namespace hotrack {

// CSV and summary writers for completed runs. All writers emit to a temporary
// file first and rename into place, so readers never observe a partial file.
//
// Trace column order (header always present): t; leader states x_0_1..x_0_l;
// follower states x_i_1..x_i_l for i = 1..N; applied controls u_i; input
// estimates uhat_i; adaptive gains d_i; leader-state estimates x0hat_i_1
// (nonlinear runs only) and x0hat_i_2..x0hat_i_l; self estimates
// xhat_i_2..xhat_i_l; observer internals z0_i_2..z0_i_l and z_i_2..z_i_l.
// Within each block followers appear in index order.
void write_trace_csv(const TraceLog& log, const std::string& path);

// t plus the four sup-norm error columns:
// e_input, e_leader_state, e_self_state, e_tracking.
void write_errors_csv(const TraceLog& log, const std::string& path);

// Human-readable run digest: horizon, step, final and peak error norms,
// threshold crossing times, minimum adaptive-gain increment.
void write_summary(const TraceLog& log, const std::string& path);

}  // namespace hotrack
