#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qtherm/spectra.hpp"

namespace qtherm {

using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

/// Row-major (system-first) flattening of a two-factor tensor space:
/// (i, j) <-> i * d_right + j. This single convention is used everywhere.
struct JointIndex {
    int d_left;
    int d_right;

    int dim() const { return d_left * d_right; }
    int flat(int i, int j) const { return i * d_right + j; }
    std::pair<int, int> unflat(int k) const { return {k / d_right, k % d_right}; }
};

enum class Side { Left, Right };

/// Throws unless rho is Hermitian (kHermitianTol), unit trace (kProbTol) and
/// has eigenvalues >= -1e-10.
void validate_density(const Mat& rho);

/// Throws unless U U^dagger = 1 within kUnitaryTol in max-entry norm.
void validate_unitary(const Mat& u);

/// Diagonal density matrix from populations.
Mat diagonal_state(const Vec& populations);

/// Entry (i,j) of the result is a_i * b_j under the JointIndex convention.
Vec tensor_diag(const Vec& a, const Vec& b);

/// Non-interacting joint spectrum E_i + E_j, laid out in JointIndex order
/// (not re-sorted; the index labeling is authoritative).
std::pair<Vec, JointIndex> joint_hamiltonian(const Hamiltonian& h_left, const Hamiltonian& h_right);

/// U rho U^dagger.
Mat apply_unitary(const Mat& rho, const Mat& u);

/// Reduced state on the kept side.
Mat partial_trace(const Mat& rho, const JointIndex& idx, Side keep);

/// Real parts of the diagonal; throws if any diagonal imaginary part exceeds
/// kHermitianTol.
Vec diag_of(const Mat& rho);

/// Haar-distributed unitary: QR of a complex standard-normal matrix with the
/// R diagonal phases fixed. Deterministic for a fixed seed.
Mat haar_random_unitary(int d, std::uint64_t seed);

/// Group label per index, equal labels meaning equal energy within
/// kDegeneracyTol (chained on the sorted values).
std::vector<int> energy_group_labels(const Vec& h_flat);

/// True iff U is block-diagonal over equal-energy index groups, i.e.
/// [U, diag(h_flat)] vanishes up to kUnitaryTol on the off-blocks.
bool commutes_with_hamiltonian(const Mat& u, const Vec& h_flat);

} // namespace qtherm
