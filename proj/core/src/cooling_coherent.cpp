#include "qtherm/cooling_coherent.hpp"

#include <algorithm>
#include <cmath>

namespace qtherm {

namespace {

double qubit_ground_pop(double gap, Beta beta) {
    return gibbs_populations(Hamiltonian::qubit(gap), beta)(0);
}

void check_target_range(double r_target, double lo, double hi) {
    if (r_target < lo - 1e-12 || r_target > hi + 1e-12)
        throw UnsupportedError("target ground population outside the reachable range");
}

Hamiltonian implied_system(const Vec& sigma) {
    // Populations alone fix the marginal update; a trivial equally spaced
    // spectrum stands in when the caller does not track work.
    std::vector<double> e(static_cast<size_t>(sigma.size()));
    for (size_t i = 0; i < e.size(); ++i)
        e[i] = static_cast<double>(i);
    return Hamiltonian(e);
}

} // namespace

Vec universal_bound_state(int d_s, double e_max, Beta beta_r) {
    if (d_s < 2)
        throw UnsupportedError("system dimension must be >= 2");
    if (e_max < 0)
        throw UnsupportedError("maximal machine gap must be >= 0");
    Vec p(d_s);
    if (beta_r.is_zero_temperature() && e_max > 0) {
        p.setZero();
        p(0) = 1.0;
        return p;
    }
    const double ratio = std::exp(-beta_r.value() * e_max);
    double w = 1.0;
    for (int k = 0; k < d_s; ++k) {
        p(k) = w;
        w *= ratio;
    }
    return p / p.sum();
}

MaxCooling max_cooling_population(const Hamiltonian& system, const MachineSpec& machine) {
    const Vec joint =
        tensor_diag(gibbs_populations(system, machine.beta_r), machine.thermal_populations());
    MaxCooling out;
    out.permutation = descending_order(joint);
    const int d_m = machine.hamiltonian.dim();
    for (int j = 0; j < d_m; ++j)
        out.r_star += joint(out.permutation[static_cast<size_t>(j)]);
    return out;
}

Endpoint endpoint_min_work(const Hamiltonian& system, const MachineSpec& machine) {
    const Vec joint =
        tensor_diag(gibbs_populations(system, machine.beta_r), machine.thermal_populations());
    auto [energies, idx] = joint_hamiltonian(system, machine.hamiltonian);
    const int d_m = machine.hamiltonian.dim();
    const int d = idx.dim();
    const Vec sorted = passive_sort(joint);

    Endpoint out;
    out.joint_populations = Vec::Zero(d);
    // Top block: flat indices (0, j) carry the machine energies in increasing
    // order, so the d_M largest populations go there as they come.
    for (int j = 0; j < d_m; ++j)
        out.joint_populations(j) = sorted(j);
    // Remainder: inversely ordered against the remaining energies.
    std::vector<int> rest(static_cast<size_t>(d - d_m));
    for (int i = d_m; i < d; ++i)
        rest[static_cast<size_t>(i - d_m)] = i;
    std::stable_sort(rest.begin(), rest.end(),
                     [&](int a, int b) { return energies(a) < energies(b); });
    for (int r = 0; r < d - d_m; ++r)
        out.joint_populations(rest[static_cast<size_t>(r)]) = sorted(d_m + r);

    out.delta_f = (out.joint_populations - joint).dot(energies);
    return out;
}

QubitSwapSolution one_qubit_optimal(double system_gap, double machine_gap, Beta beta_r,
                                    double r_target) {
    if (!(machine_gap > system_gap))
        throw UnsupportedError("one-qubit machine cools only for machine gap > system gap");
    const double r_s = qubit_ground_pop(system_gap, beta_r);
    const double r_m = qubit_ground_pop(machine_gap, beta_r);
    check_target_range(r_target, r_s, r_m);

    QubitSwapSolution sol;
    const double mu = std::clamp((r_target - r_s) / (r_m - r_s), 0.0, 1.0);
    sol.swap_parameter = std::asin(std::sqrt(mu));
    sol.delta_f = (r_target - r_s) * (machine_gap - system_gap);
    sol.final_populations = Vec(2);
    sol.final_populations << r_target, 1.0 - r_target;
    return sol;
}

TwoQubitSchedule two_qubit_optimal(double system_gap, double m1_gap, double m2_gap, Beta beta_r,
                                   double r_target) {
    if (std::abs(m1_gap - (system_gap + m2_gap)) > 1e-9)
        throw UnsupportedError("two-qubit machine requires m1_gap = system_gap + m2_gap");
    const double r_s = qubit_ground_pop(system_gap, beta_r);
    const double r_m1 = qubit_ground_pop(m1_gap, beta_r);
    const double r_m2 = qubit_ground_pop(m2_gap, beta_r);
    check_target_range(r_target, r_s, r_m1);

    TwoQubitSchedule out;
    out.final_populations = Vec(2);
    out.final_populations << r_target, 1.0 - r_target;

    if (m2_gap <= system_gap) {
        const double mu = std::clamp((r_target - r_s) / (r_m1 - r_s), 0.0, 1.0);
        if (mu > 0)
            out.stages.push_back({1, std::asin(std::sqrt(mu))});
        out.delta_f = (r_target - r_s) * (m1_gap - system_gap);
        return out;
    }

    // m2_gap > system_gap: partial swap with M2 up to r_M2 (cheaper slope),
    // then continue with M1.
    double mu;
    if (r_target <= r_m2) {
        mu = (r_target - r_s) / (2.0 * (r_m2 - r_s));
        out.delta_f = (r_target - r_s) * (m2_gap - system_gap);
    } else {
        mu = (r_target - r_m2) / (2.0 * (r_m1 - r_m2)) + 0.5;
        out.delta_f =
            (r_m2 - r_s) * (m2_gap - system_gap) + (r_target - r_m2) * (m1_gap - system_gap);
    }
    const double f = std::asin(std::sqrt(std::clamp(2.0 * mu, 0.0, 1.0)));
    const double g = std::asin(std::sqrt(std::clamp(2.0 * mu - 1.0, 0.0, 1.0)));
    if (f > 0)
        out.stages.push_back({2, f});
    if (g > 0)
        out.stages.push_back({1, g});
    return out;
}

StepOutcome protocol_a_step_full(const Vec& sigma, const MachineSpec& machine,
                                 const Hamiltonian& system) {
    validate_populations(sigma);
    const Vec tau = machine.thermal_populations();
    const Vec joint = tensor_diag(sigma, tau);
    const Vec sorted = passive_sort(joint);
    auto [energies, idx] = joint_hamiltonian(system, machine.hamiltonian);

    StepOutcome out;
    out.populations = Vec::Zero(sigma.size());
    for (int i = 0; i < idx.d_left; ++i)
        for (int j = 0; j < idx.d_right; ++j)
            out.populations(i) += sorted(idx.flat(i, j));
    // Rounding sheds ~1e-16 of mass per cycle, which long protocol runs
    // would accumulate past the population tolerance.
    out.populations /= out.populations.sum();
    out.work = (sorted - joint).dot(energies);
    return out;
}

Vec protocol_a_step(const Vec& sigma, const MachineSpec& machine) {
    return protocol_a_step_full(sigma, machine, implied_system(sigma)).populations;
}

StepOutcome protocol_b_step_full(const Vec& sigma, const MachineSpec& machine,
                                 const Hamiltonian& system) {
    validate_populations(sigma);
    const Vec tau = machine.thermal_populations();
    const int d_s = static_cast<int>(sigma.size());
    const int d_m = machine.hamiltonian.dim();
    const Vec passified = passive_sort(sigma);

    // Population gain on level k-1 from swapping (k-1, k) against the
    // machine's extreme levels; ties resolve to the smallest index.
    int k_bar = 0;
    double best = 0.0;
    for (int i = 1; i < d_s; ++i) {
        const double delta = passified(i) * tau(0) - passified(i - 1) * tau(d_m - 1);
        if (delta > best) {
            best = delta;
            k_bar = i;
        }
    }

    Vec joint = tensor_diag(passified, tau);
    JointIndex idx{d_s, d_m};
    if (k_bar > 0)
        std::swap(joint(idx.flat(k_bar - 1, d_m - 1)), joint(idx.flat(k_bar, 0)));

    Vec marginal = Vec::Zero(d_s);
    Vec machine_marginal = Vec::Zero(d_m);
    for (int i = 0; i < d_s; ++i)
        for (int j = 0; j < d_m; ++j) {
            marginal(i) += joint(idx.flat(i, j));
            machine_marginal(j) += joint(idx.flat(i, j));
        }

    StepOutcome out;
    out.populations = passive_sort(marginal);
    out.populations /= out.populations.sum();
    out.work = out.populations.dot(system.energies()) - sigma.dot(system.energies()) +
               machine_marginal.dot(machine.hamiltonian.energies()) -
               tau.dot(machine.hamiltonian.energies());
    return out;
}

Vec protocol_b_step(const Vec& sigma, const MachineSpec& machine) {
    return protocol_b_step_full(sigma, machine, implied_system(sigma)).populations;
}

ProtocolTrace iterate_protocol(const CoolingStepFn& step_fn, const Vec& initial,
                               const MachineSpec& machine, double tol, int max_steps) {
    if (!(tol > 0))
        throw UnsupportedError("convergence tolerance must be positive");
    ProtocolTrace trace;
    trace.steps.push_back({0, initial, initial(0), 0.0});
    Vec current = initial;
    double work = 0.0;
    for (int n = 1; n <= max_steps; ++n) {
        StepOutcome step = step_fn(current, machine);
        work += step.work;
        trace.steps.push_back({n, step.populations, step.populations(0), work});
        if ((step.populations - current).cwiseAbs().maxCoeff() < tol) {
            trace.converged = true;
            break;
        }
        current = step.populations;
    }
    return trace;
}

RepeatedCoherent repeated_two_qubit_coherent(int n, const TwoQubitParams& params) {
    if (n < 1)
        throw UnsupportedError("cycle count must be >= 1");
    if (std::abs(params.m1_gap - (params.system_gap + params.m2_gap)) > 1e-9)
        throw UnsupportedError("two-qubit machine requires m1_gap = system_gap + m2_gap");
    const double r_s = qubit_ground_pop(params.system_gap, params.beta_r);
    const double r_m1 = qubit_ground_pop(params.m1_gap, params.beta_r);
    const double r_m2 = qubit_ground_pop(params.m2_gap, params.beta_r);

    // Virtual qubit spanned by the machine's |00> and |11> levels.
    const double n_v = r_m1 * r_m2 + (1.0 - r_m1) * (1.0 - r_m2);
    const double r_v = r_m1 * r_m2 / n_v;

    RepeatedCoherent out;
    out.r_n = r_v + std::pow(1.0 - n_v, n - 1) * (r_m1 - r_v);

    // First-cycle endpoint cost, then slope 2 E_M2 per unit of further cooling.
    double delta_f_star;
    if (params.m2_gap <= params.system_gap)
        delta_f_star = (r_m1 - r_s) * (params.m1_gap - params.system_gap);
    else
        delta_f_star = (r_m2 - r_s) * (params.m2_gap - params.system_gap) +
                       (r_m1 - r_m2) * (params.m1_gap - params.system_gap);
    out.delta_f_n = delta_f_star + 2.0 * params.m2_gap * (out.r_n - r_m1);
    return out;
}

double repeated_two_qubit_coherent_limit_temperature(const TwoQubitParams& params) {
    if (params.beta_r.is_zero_temperature())
        return 0.0;
    return params.system_gap * params.beta_r.temperature() / (params.m1_gap + params.m2_gap);
}

} // namespace qtherm
