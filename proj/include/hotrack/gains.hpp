#pragma once

#include <Eigen/Dense>

#include "hotrack/errors.hpp"

namespace hotrack {

// All tunable gains of the control/observer stack. Storage is 0-based; the
// paper-style order index m is exposed through accessors so formulas read like
// the derivations they implement:
//   km(m), m=1..l; c0m(m), m=1..l; rm(m), m=2..l.
struct GainSet {
  Eigen::VectorXd k;    // controller gains k_1..k_l
  Eigen::VectorXd c0;   // leader-state observer gains c0_1..c0_l
                        // (c0_1 only enters the first-state estimator used in
                        //  nonlinear mode)
  Eigen::VectorXd r;    // self-observer gains r_2..r_l, size l-1
  Eigen::VectorXd tau;  // adaptation rates tau_1..tau_N
  Eigen::VectorXd d0;   // initial adaptive gains d_i(0), size N

  double km(int m) const { return k(m - 1); }
  double c0m(int m) const { return c0(m - 1); }
  double rm(int m) const { return r(m - 2); }

  // checks sizes against (l, N) and strict positivity of every entry;
  // appends problems to issues instead of throwing so callers can batch
  void collect_issues(int l, int n_followers, std::vector<std::string>& issues) const;
  void validate(int l, int n_followers) const;
};

}  // namespace hotrack
