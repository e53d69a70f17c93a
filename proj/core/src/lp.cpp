#include "qtherm/lp.hpp"

#include <cmath>
#include <limits>

#include "qtherm/errors.hpp"

namespace qtherm {
namespace lp {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    RMat t;                  // m x (n + m + 1): original vars, artificials, rhs
    std::vector<int> basis;  // basic variable per row
    int n = 0;
    int m = 0;

    double rhs(int i) const { return t(i, n + m); }

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row)
                continue;
            const double f = t(i, col);
            if (f != 0.0)
                t.row(i) -= f * t.row(row);
        }
        basis[static_cast<size_t>(row)] = col;
    }
};

// Bland's rule: entering = lowest eligible index, leaving = lowest basic
// index among the minimum ratios. Guarantees termination.
bool simplex_min(Tableau& tab, const Vec& cost, int max_col) {
    const int m = tab.m;
    while (true) {
        Vec pi = Vec::Zero(max_col);
        for (int i = 0; i < m; ++i)
            if (cost(tab.basis[static_cast<size_t>(i)]) != 0.0)
                pi += cost(tab.basis[static_cast<size_t>(i)]) * tab.t.row(i).head(max_col).transpose();
        int enter = -1;
        for (int j = 0; j < max_col; ++j) {
            const double reduced = cost(j) - pi(j);
            if (reduced < -kPivotTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0)
            return true;
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double a = tab.t(i, enter);
            if (a > kPivotTol) {
                const double ratio = tab.rhs(i) / a;
                if (ratio < best_ratio - kPivotTol ||
                    (ratio < best_ratio + kPivotTol && leave >= 0 &&
                     tab.basis[static_cast<size_t>(i)] < tab.basis[static_cast<size_t>(leave)])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0)
            return false; // unbounded
        tab.pivot(leave, enter);
    }
}

} // namespace

Result solve(const RMat& a, const Vec& b, const Vec& c, double tol) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Tableau tab;
    tab.n = n;
    tab.m = m;
    tab.t = RMat::Zero(m, n + m + 1);
    tab.t.block(0, 0, m, n) = a;
    tab.t.col(n + m) = b;
    // Flip rows with a negative rhs before installing the artificial basis.
    for (int i = 0; i < m; ++i) {
        if (tab.t(i, n + m) < 0)
            tab.t.row(i) = -tab.t.row(i);
        tab.t(i, n + i) = 1.0;
        tab.basis.push_back(n + i);
    }

    // Phase 1: minimize the artificial mass.
    Vec phase1_cost = Vec::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    if (!simplex_min(tab, phase1_cost, n + m))
        throw InternalError("lp: phase 1 unbounded");

    double artificial_mass = 0.0;
    for (int i = 0; i < m; ++i)
        if (tab.basis[static_cast<size_t>(i)] >= n)
            artificial_mass += tab.rhs(i);

    Result res;
    if (artificial_mass > tol) {
        // Farkas certificate from the phase-1 multipliers: the artificial
        // columns of the final tableau hold B^{-1}, so pi = c_B B^{-1}.
        Vec y = Vec::Zero(m);
        for (int r = 0; r < m; ++r)
            for (int i = 0; i < m; ++i)
                if (tab.basis[static_cast<size_t>(i)] >= n)
                    y(r) += tab.t(i, n + r);
        // Undo the row sign flips applied to make the rhs nonnegative.
        for (int r = 0; r < m; ++r)
            if (b(r) < 0)
                y(r) = -y(r);
        res.farkas = y;
        return res;
    }

    // Drive any zero-level artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[static_cast<size_t>(i)] < n)
            continue;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab.t(i, j)) > kPivotTol) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2 over the original columns only.
    Vec phase2_cost = Vec::Zero(n + m);
    phase2_cost.head(n) = c;
    if (!simplex_min(tab, phase2_cost, n))
        throw InternalError("lp: phase 2 unbounded");

    res.feasible = true;
    res.x = Vec::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tab.basis[static_cast<size_t>(i)] < n)
            res.x(tab.basis[static_cast<size_t>(i)]) = tab.rhs(i);
    res.objective = c.dot(res.x);
    return res;
}

Result feasible_point(const RMat& a, const Vec& b, double tol) {
    return solve(a, b, Vec::Zero(a.cols()), tol);
}

} // namespace lp

PolytopeMembership polytope_membership(const Vec& target, const std::vector<Vec>& vertices,
                                       double tol) {
    if (vertices.empty())
        throw UnsupportedError("polytope_membership needs at least one vertex");
    const int dim = static_cast<int>(target.size());
    const int nv = static_cast<int>(vertices.size());
    RMat a(dim + 1, nv);
    for (int j = 0; j < nv; ++j) {
        if (vertices[static_cast<size_t>(j)].size() != dim)
            throw UnsupportedError("polytope vertex dimension mismatch");
        a.col(j).head(dim) = vertices[static_cast<size_t>(j)];
        a(dim, j) = 1.0;
    }
    Vec b(dim + 1);
    b.head(dim) = target;
    b(dim) = 1.0;

    const lp::Result r = lp::feasible_point(a, b, tol);
    PolytopeMembership out;
    if (r.feasible) {
        out.inside = true;
        out.weights = r.x;
        return out;
    }
    Vec y = r.farkas;
    out.normal = y.head(dim);
    out.offset = y(dim);
    const double scale = out.normal.norm();
    if (scale > 0) {
        out.normal /= scale;
        out.offset /= scale;
    }
    out.violation = out.normal.dot(target) + out.offset;
    return out;
}

} // namespace qtherm
