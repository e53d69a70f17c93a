#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qtherm/quantum.hpp"
#include "qtherm/spectra.hpp"

namespace qtherm {

inline constexpr double kStochasticTol = 1e-10;

/// Throws unless m has entries >= -1e-12 and unit row/column sums within
/// kStochasticTol.
void validate_doubly_stochastic(const RMat& m);

struct MajorizationResult {
    bool holds = false;
    bool sum_mismatch = false;
    operator bool() const { return holds; }
};

/// Does x majorize y? Descending partial sums of x dominate those of y within
/// kMajorizationTol and the totals agree within 1e-9 (a total mismatch is
/// reported via the sum_mismatch flag and the relation is false).
MajorizationResult majorizes(const Vec& x, const Vec& y);

/// Prefix-sum order on population vectors taken in energy order, WITHOUT
/// reordering. Colder means every prefix sum of p dominates that of q.
enum class SumOrder { Colder, Hotter, Equal, Incomparable };

SumOrder sum_compare(const Vec& p, const Vec& q);

/// T-transform (1-t) I + t Q_{ij} where Q_{ij} swaps indices i and j.
RMat t_transform(double t, int i, int j, int d);

/// One link of a T-transform chain, with its orthogonal-rotation witness
/// parameters: the rotation in the (i,j) plane with cos^2(theta) = 1 - t has
/// entrywise squared moduli equal to the T-transform.
struct TTransformStep {
    double t;
    int i;
    int j;
};

struct HornTransfer {
    RMat matrix;                      // doubly stochastic, matrix * y = x
    std::vector<TTransformStep> chain; // applied left to right: T_k ... T_1 y = x
};

/// Constructive Horn transfer: given x majorized by y, build a doubly
/// stochastic M with M y = x as a product of at most d-1 T-transforms.
/// Throws MajorizationError (carrying the first violated prefix) otherwise.
HornTransfer horn_transfer(const Vec& x, const Vec& y);

/// Real orthogonal witness for a T-transform chain: the product of the 2x2
/// rotation blocks, whose entrywise squared moduli map y to x.
RMat horn_unitary(const HornTransfer& transfer, int d);

struct BirkhoffTerm {
    double weight;
    std::vector<int> permutation; // row i of the permutation matrix is e_{perm[i]}
};

/// Greedy Birkhoff-von Neumann decomposition: repeatedly extract the
/// permutation found by maximum-weight matching on the positive support,
/// with weight equal to the minimum matched entry. At most (d-1)^2 + 1 terms.
std::vector<BirkhoffTerm> birkhoff_decompose(const RMat& m);

RMat permutation_matrix(const std::vector<int>& perm);

/// Entries sorted non-increasing; ties keep their original relative order.
Vec passive_sort(const Vec& p);

/// Permutation s with out(i) = p(s[i]) sorted non-increasing, stable on ties.
std::vector<int> descending_order(const Vec& p);

} // namespace qtherm
