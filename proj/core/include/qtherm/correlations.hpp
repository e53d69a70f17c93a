#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qtherm/lp.hpp"
#include "qtherm/majorization.hpp"
#include "qtherm/quantum.hpp"
#include "qtherm/spectra.hpp"

namespace qtherm {

/// Latin-square partition of the d x d product basis into the cyclic blocks
/// span{|j, j+i>}_j, together with the diagonal of tau(beta) x tau(beta)
/// restricted to each block.
struct BlockDecomposition {
    int d = 0;
    std::vector<std::vector<int>> blocks; // flat indices of block i, j-th entry |j, j+i>
    std::vector<Vec> block_vectors;       // r_i
};

BlockDecomposition latin_blocks(const Hamiltonian& h, Beta beta);

/// Target block vectors b_i built the same way from tau(beta_prime).
std::vector<Vec> target_blocks(const Hamiltonian& h, Beta beta_prime);

/// Transform certificate: the free matrices M_0..M_k, the marginal they
/// achieve, and its max-norm distance to the target.
struct StuCertificate {
    std::vector<RMat> matrices;
    Vec achieved_marginal;
    double residual = 0.0;
};

/// Number of free block matrices: k = (d-1)/2 for odd d, d/2 for even d.
int free_block_count(int d);

/// Evaluates the marginal transform
///   M_0 r_0 + sum_i (floor(2i/d)+1)^{-1} (1 + Pi^i) M_i r_i.
Vec marginal_transform(const BlockDecomposition& blocks, const std::vector<RMat>& ms, int d);

/// All d applied block matrices, including the symmetry completion
/// M_{d-i} = Pi^i M_i Pi^{-i} (and the symmetrized middle block for even d).
std::vector<RMat> completed_block_matrices(const std::vector<RMat>& ms, int d);

/// Cyclic shift matrix that pushes every vector entry down once.
RMat cyclic_shift(int d);

/// S(rho_A) + S(rho_B) - S(rho_AB) in nats, from eigenvalue entropies.
double mutual_information(const Mat& rho, const JointIndex& idx);

struct JaynesBound {
    Beta beta_c;
    double bound = 0.0;
    bool clamped_uniform = false; // c at or above the infinite-temperature energy
    bool below_initial = false;   // c below the initial thermal energy
};

/// Maximum-entropy ceiling on the marginal entropy sum at energy budget c:
/// solves Tr(tau_A(b) H_A) + Tr(tau_B(b) H_B) = c by bisection on [0, beta_r].
JaynesBound jaynes_bound(const Hamiltonian& h_a, const Hamiltonian& h_b, Beta beta_r, double c);

struct PureStateOptimum {
    Beta beta_c;
    Vec marginal_a;
    Vec marginal_b;
    double info = 0.0; // 2 S(marginal)
};

/// Optimal correlations from a pure (zero-temperature) initial state: both
/// marginals are rank-d truncated thermal states of the combined spectrum
/// E_i^A + E_i^B with beta(c) fixed by the energy budget.
PureStateOptimum pure_state_optimum(const Hamiltonian& h_a, const Hamiltonian& h_b, double c);

/// Symmetrically thermalizing construction for d = 3 via the majorized
/// marginal route: M_0 moves the whole marginal, M_1 is recovered from the
/// commute-through relation M_0 (1 + Pi) = (1 + Pi) M_1.
StuCertificate stu_d3_majorized_marginal(const Hamiltonian& h, Beta beta_r, Beta beta_prime);

/// Passing-on-the-norm construction. Valid for d = 2 and 3 always, and for
/// d = 4 when the gaps decrease (delta_{i+1} <= delta_i); other d = 4
/// profiles are rejected.
StuCertificate stu_passing_norm(const Hamiltonian& h, Beta beta_r, Beta beta_prime);

/// Geometric construction for d in {3, 4}: expresses the target as a convex
/// combination of staircase waypoints, each certified inside the transform
/// polytope by exact linear programming over a curated vertex subset.
StuCertificate stu_geometric(const Hamiltonian& h, Beta beta_r, Beta beta_prime);

/// Coordinates x_i = (i+1) p_{i+1} - sum_{j<=i} p_j that parameterize the
/// probability simplex; the uniform point is the origin and the ground state
/// is (-1, ..., -1).
Vec simplex_coordinates(const Vec& p);
Vec simplex_to_populations(const Vec& x);

/// Block-diagonal unitary realizing the certificate: each applied block
/// matrix is re-derived as a T-transform product targeting its block image,
/// whose rotation witness is assembled on the block's basis states.
Mat build_stu_unitary(const StuCertificate& cert, const BlockDecomposition& blocks);

/// Does M (1 + Pi) = (1 + Pi) X admit a doubly stochastic X? Used both by
/// the d = 3 construction (feasible for every permutation) and to exhibit
/// the d = 4 counterexample. On failure the Farkas certificate is exposed.
struct CommuteThrough {
    bool feasible = false;
    RMat m_tilde;
    Vec farkas;
    double violation = 0.0;
};

CommuteThrough commute_through(const RMat& m);

/// Entropy triangle inequality |S_A - S_B| <= S_AB applied to hypothetical
/// equal-temperature thermal marginals; a violation certifies that no
/// unitary can produce them.
struct TriangleCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool feasible = true;
};

TriangleCheck thermal_marginal_triangle_check(const Hamiltonian& h_a, const Hamiltonian& h_b,
                                              Beta beta_r, Beta beta_prime);

struct OracleResult {
    double best_info = 0.0;
    double best_energy = 0.0;
    int samples_used = 0;
    int descent_improvements = 0;
};

/// Lower bound on the constrained correlation optimum: Haar samples refined
/// by coordinate descent over two-level rotations, subject to average energy
/// at most c. Deterministic for a fixed (seed, samples).
OracleResult brute_force_max_correlations(const Hamiltonian& h_a, const Hamiltonian& h_b,
                                          Beta beta_r, double c, int samples, std::uint64_t seed);

} // namespace qtherm
