#pragma once

#include <functional>
#include <vector>

#include "qtherm/majorization.hpp"
#include "qtherm/quantum.hpp"
#include "qtherm/spectra.hpp"

namespace qtherm {

/// A machine: its spectrum plus the background inverse temperature it
/// rethermalizes to between cycles.
struct MachineSpec {
    Hamiltonian hamiltonian;
    Beta beta_r;

    Vec thermal_populations() const { return gibbs_populations(hamiltonian, beta_r); }
    double max_gap() const { return hamiltonian.max_energy(); }
};

struct ProtocolStep {
    int index = 0;
    Vec populations;
    double ground_pop = 0.0;
    double work_cumulative = 0.0;
};

struct ProtocolTrace {
    std::vector<ProtocolStep> steps;
    bool converged = false;

    const ProtocolStep& last() const { return steps.back(); }
};

/// Coldest population profile reachable with a machine of maximal gap e_max:
/// geometric with ratio exp(-beta_r * e_max).
Vec universal_bound_state(int d_s, double e_max, Beta beta_r);

struct MaxCooling {
    double r_star = 0.0;
    std::vector<int> permutation; // new flat index i takes old joint index permutation[i]
};

/// Largest reachable ground population in a single cycle: the sum of the d_M
/// largest joint-population entries, with a permutation placing them on the
/// (0, j) indices.
MaxCooling max_cooling_population(const Hamiltonian& system, const MachineSpec& machine);

struct Endpoint {
    Vec joint_populations;
    double delta_f = 0.0;
};

/// Joint diagonal that reaches r_star at minimal work cost: the top d_M
/// entries inversely ordered against the first d_M joint energies and the
/// remainder against the rest.
Endpoint endpoint_min_work(const Hamiltonian& system, const MachineSpec& machine);

struct QubitSwapSolution {
    double swap_parameter = 0.0; // arcsin(sqrt(mu))
    double delta_f = 0.0;
    Vec final_populations;
};

/// Optimal single-cycle cooling of a qubit with a one-qubit machine:
/// mu = (r_target - r_S)/(r_M - r_S), work (r_target - r_S)(E_M - E_S).
QubitSwapSolution one_qubit_optimal(double system_gap, double machine_gap, Beta beta_r,
                                    double r_target);

struct TwoQubitSchedule {
    struct Stage {
        int machine_qubit; // 1 or 2
        double parameter;  // swap angle
    };
    std::vector<Stage> stages;
    double delta_f = 0.0;
    Vec final_populations;
};

/// Optimal single-cycle cooling of a qubit with the resonant two-qubit
/// machine (m1_gap = system_gap + m2_gap). For m2_gap <= system_gap a single
/// partial swap with M1; otherwise swap with M2 up to r_M2, then with M1,
/// with the piecewise-linear work cost of the two-case solution.
TwoQubitSchedule two_qubit_optimal(double system_gap, double m1_gap, double m2_gap, Beta beta_r,
                                   double r_target);

struct StepOutcome {
    Vec populations;
    double work = 0.0;
};

/// One step of the optimal protocol: tensor with the machine thermal state,
/// reorder all joint populations descending onto the flat index order, trace
/// out the machine. The output is passive. The _full variant also reports
/// the work cost against the given system spectrum.
StepOutcome protocol_a_step_full(const Vec& sigma, const MachineSpec& machine,
                                 const Hamiltonian& system);
Vec protocol_a_step(const Vec& sigma, const MachineSpec& machine);

/// One step of the max-swap protocol: swap the pair of target levels with
/// the largest positive population gain against the machine's extreme
/// levels, passifying before and after.
StepOutcome protocol_b_step_full(const Vec& sigma, const MachineSpec& machine,
                                 const Hamiltonian& system);
Vec protocol_b_step(const Vec& sigma, const MachineSpec& machine);

using CoolingStepFn = std::function<StepOutcome(const Vec&, const MachineSpec&)>;

/// Iterate a step function until successive population vectors differ by
/// less than tol in max norm (or max_steps is hit); records every step.
ProtocolTrace iterate_protocol(const CoolingStepFn& step_fn, const Vec& initial,
                               const MachineSpec& machine, double tol = 1e-12,
                               int max_steps = 1000000);

struct RepeatedCoherent {
    double r_n = 0.0;
    double delta_f_n = 0.0;
};

struct TwoQubitParams {
    double system_gap;
    double m1_gap;
    double m2_gap;
    Beta beta_r;
};

/// Closed forms for n repeated optimal cycles of the resonant two-qubit
/// machine; n = 1 reaches r_M1, and the asymptotic temperature is
/// E_S T_R / (E_M1 + E_M2).
RepeatedCoherent repeated_two_qubit_coherent(int n, const TwoQubitParams& params);

double repeated_two_qubit_coherent_limit_temperature(const TwoQubitParams& params);

} // namespace qtherm
