#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qtherm/quantum.hpp"

namespace qtherm {
namespace lp {

/// Outcome of solving  min c.x  s.t.  A x = b, x >= 0  on a small dense
/// instance with the primal simplex (phase 1 + phase 2, Bland's rule).
/// When phase 1 ends with positive artificial mass, the problem is
/// infeasible and `farkas` holds a certificate y with y.A <= 0 (entrywise)
/// and y.b > 0.
struct Result {
    bool feasible = false;
    Vec x;
    double objective = 0.0;
    Vec farkas;
};

Result solve(const RMat& a, const Vec& b, const Vec& c, double tol = 1e-9);

/// Feasibility of A x = b, x >= 0 (zero objective).
Result feasible_point(const RMat& a, const Vec& b, double tol = 1e-9);

} // namespace lp

/// Membership of `target` in the convex hull of `vertices`. On success the
/// weights are nonnegative, sum to 1, and reproduce the target within 1e-9.
/// On failure `certificate` carries a separating hyperplane (normal, offset)
/// with normal.v + offset <= 0 for every vertex but > 1e-9 at the target.
struct PolytopeMembership {
    bool inside = false;
    Vec weights;
    Vec normal;
    double offset = 0.0;
    double violation = 0.0;
};

PolytopeMembership polytope_membership(const Vec& target, const std::vector<Vec>& vertices,
                                       double tol = 1e-9);

} // namespace qtherm
