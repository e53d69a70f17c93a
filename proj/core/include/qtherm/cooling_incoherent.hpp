#pragma once

#include <optional>
#include <vector>

#include "qtherm/cooling_coherent.hpp"
#include "qtherm/quantum.hpp"
#include "qtherm/spectra.hpp"

namespace qtherm {

/// Which tensor factors of a machine the hot bath touches; the complement
/// stays at the room temperature.
struct BathAssignment {
    std::vector<int> hot_factors;

    bool is_hot(int factor) const;
    void validate(int n_factors) const;
};

enum class DegeneracyClass { Singleton, MachineOnly, SystemOnly, Mixed };

/// An equal-energy group of joint (system, machine) levels.
struct DegenerateSubspace {
    double energy = 0.0;
    std::vector<std::pair<int, int>> indices; // (system level, machine level)
    DegeneracyClass classification = DegeneracyClass::Singleton;
    /// Mixed subspaces of a multi-factor machine survive the proven
    /// uselessness filters; everything else cannot cool.
    bool potentially_useful = false;
};

/// Groups joint levels by total energy (tolerance kDegeneracyTol) and applies
/// the uselessness filters: singletons, machine-only and system-only groups
/// never cool, and neither does any group when the machine has no tensor
/// split for the hot bath to act on.
std::vector<DegenerateSubspace> enumerate_degeneracies(
    const Hamiltonian& system, const std::vector<Hamiltonian>& machine_factors);

/// Unfactored machine: the hot bath can only heat it whole, so nothing is
/// flagged useful.
std::vector<DegenerateSubspace> enumerate_degeneracies(const Hamiltonian& system,
                                                       const Hamiltonian& machine);

/// Multi-factor product space bookkeeping: dims[0] is the system, the rest
/// machine factors, flattened row-major.
struct FactorSpace {
    std::vector<int> dims;

    int total_dim() const;
    int flat(const std::vector<int>& levels) const;
    std::vector<int> unflat(int index) const;
    /// Marginal populations of one factor from flat joint populations.
    Vec marginal(const Vec& joint, int factor) const;
};

/// Joint spectrum of system + machine factors in FactorSpace order.
Vec multi_joint_energies(const Hamiltonian& system, const std::vector<Hamiltonian>& factors);

struct IncoherentCycleResult {
    Vec sigma_out;
    double heat_drawn = 0.0;
};

/// Runs repeated incoherent cycles, tracking the hot-part marginal between
/// cycles so the heat accounting charges only what rethermalization actually
/// replaces (the naive flag instead charges the full hot-equilibration each
/// cycle).
class IncoherentCycleRunner {
  public:
    IncoherentCycleRunner(Hamiltonian system, std::vector<Hamiltonian> machine_factors,
                          BathAssignment assignment, Beta beta_r, Beta beta_h,
                          bool naive_accounting = false);

    /// One cycle: rethermalize (room parts to beta_r, hot parts to beta_h),
    /// apply the energy-conserving unitary, trace back to the system.
    IncoherentCycleResult step(const Vec& sigma, const Mat& u);

    double total_heat() const { return total_heat_; }
    const FactorSpace& space() const { return space_; }
    const Vec& joint_energies() const { return joint_energies_; }
    Vec machine_populations() const;

  private:
    Hamiltonian system_;
    std::vector<Hamiltonian> factors_;
    BathAssignment assignment_;
    Beta beta_r_;
    Beta beta_h_;
    bool naive_;
    FactorSpace space_;
    Vec joint_energies_;
    std::vector<Vec> hot_marginals_; // per hot factor, state left from last cycle
    double total_heat_ = 0.0;
};

/// Single incoherent cycle from thermal machine parts.
IncoherentCycleResult incoherent_cycle(const Hamiltonian& system,
                                       const std::vector<Hamiltonian>& machine_factors,
                                       const BathAssignment& assignment, Beta beta_r, Beta beta_h,
                                       const Vec& sigma, const Mat& u);

struct VirtualQubit {
    double norm = 0.0;       // N_V
    double ground_pop = 0.0; // r_V
    double gap = 0.0;        // E_M1 - E_M2
};

/// Virtual qubit of the two-qubit machine spanned by |01> and |10>.
VirtualQubit virtual_qubit(double m1_gap, double m2_gap, Beta beta_r, Beta beta_h);

struct IncoherentClosedForm {
    double r_n = 0.0;
    double t_n = 0.0;
    double delta_f_n = 0.0;
};

/// Closed forms for n incoherent cycles of the resonant two-qubit machine
/// (m1_gap = system_gap + m2_gap, hot bath on M2). n < 0 means the infinite
/// cycle limit.
IncoherentClosedForm two_qubit_incoherent_closed_form(const TwoQubitParams& params, Beta beta_h,
                                                      int n);

double two_qubit_incoherent_limit_temperature(const TwoQubitParams& params, Beta beta_h);

/// Machine extended with one bridging qubit per system gap,
/// gap(Q_i) = E_max - (E_i - E_{i-1}); makes every max-swap energy
/// conserving.
struct ExtendedMachine {
    std::vector<Hamiltonian> factors; // original machine first, then Q_1..Q_{d_S-1}
    std::vector<double> bridge_gaps;
};

ExtendedMachine extended_machine(const Hamiltonian& system, const Hamiltonian& machine);

/// One step of the incoherent max-swap protocol on the extended machine with
/// the bridge qubits heated to beta_h. Applies the best positive-gain
/// energy-conserving swap, or nothing when no gain is positive.
Vec incoherent_max_swap_step(const Vec& sigma, const Hamiltonian& system,
                             const Hamiltonian& machine, Beta beta_r, Beta beta_h);

struct MaxSwapOutcome {
    Vec populations;
    int swapped_level = 0;  // 0 when no swap fired
    double gain = 0.0;      // population moved toward the ground side
    double heat_drawn = 0.0; // hot-bath heat consumed by this rethermalization
};

/// Stateful trace of the incoherent max-swap protocol with the heat
/// bookkeeping: the first step pays for heating every bridge qubit from the
/// room temperature, later steps only replace what the previous swap moved.
class MaxSwapRunner {
  public:
    MaxSwapRunner(Hamiltonian system, Hamiltonian machine, Beta beta_r, Beta beta_h);

    MaxSwapOutcome step(const Vec& sigma);
    double total_heat() const { return total_heat_; }
    /// Free-energy cost of the heat drawn so far, Q (1 - beta_h/beta_r).
    double total_delta_f() const;
    const ExtendedMachine& machine() const { return extended_; }

  private:
    Hamiltonian system_;
    Hamiltonian machine_;
    Beta beta_r_;
    Beta beta_h_;
    ExtendedMachine extended_;
    bool first_ = true;
    int last_swapped_ = 0;
    double last_gain_ = 0.0;
    double total_heat_ = 0.0;
};

} // namespace qtherm
