#include "qtherm/cooling_incoherent.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qtherm {

bool BathAssignment::is_hot(int factor) const {
    return std::find(hot_factors.begin(), hot_factors.end(), factor) != hot_factors.end();
}

void BathAssignment::validate(int n_factors) const {
    std::set<int> seen;
    for (int f : hot_factors) {
        if (f < 0 || f >= n_factors)
            throw UnsupportedError("bath assignment names a machine factor that does not exist");
        if (!seen.insert(f).second)
            throw UnsupportedError("bath assignment lists a factor twice");
    }
}

int FactorSpace::total_dim() const {
    int d = 1;
    for (int x : dims)
        d *= x;
    return d;
}

int FactorSpace::flat(const std::vector<int>& levels) const {
    int index = 0;
    for (size_t f = 0; f < dims.size(); ++f)
        index = index * dims[f] + levels[f];
    return index;
}

std::vector<int> FactorSpace::unflat(int index) const {
    std::vector<int> levels(dims.size());
    for (size_t f = dims.size(); f-- > 0;) {
        levels[f] = index % dims[f];
        index /= dims[f];
    }
    return levels;
}

Vec FactorSpace::marginal(const Vec& joint, int factor) const {
    Vec out = Vec::Zero(dims[static_cast<size_t>(factor)]);
    for (int k = 0; k < total_dim(); ++k)
        out(unflat(k)[static_cast<size_t>(factor)]) += joint(k);
    return out;
}

Vec multi_joint_energies(const Hamiltonian& system, const std::vector<Hamiltonian>& factors) {
    FactorSpace space;
    space.dims.push_back(system.dim());
    for (const Hamiltonian& f : factors)
        space.dims.push_back(f.dim());
    Vec e(space.total_dim());
    for (int k = 0; k < space.total_dim(); ++k) {
        const std::vector<int> lv = space.unflat(k);
        double sum = system.energy(lv[0]);
        for (size_t f = 0; f < factors.size(); ++f)
            sum += factors[f].energy(lv[f + 1]);
        e(k) = sum;
    }
    return e;
}

std::vector<DegenerateSubspace> enumerate_degeneracies(
    const Hamiltonian& system, const std::vector<Hamiltonian>& machine_factors) {
    if (machine_factors.empty())
        throw UnsupportedError("machine needs at least one factor");
    FactorSpace machine_space;
    for (const Hamiltonian& f : machine_factors)
        machine_space.dims.push_back(f.dim());
    const int d_m = machine_space.total_dim();
    const int d_s = system.dim();
    if (d_s * d_m > 64)
        throw UnsupportedError("joint dimension above 64 is out of scope");

    Vec joint(d_s * d_m);
    for (int i = 0; i < d_s; ++i)
        for (int j = 0; j < d_m; ++j) {
            const std::vector<int> ml = machine_space.unflat(j);
            double em = 0;
            for (size_t f = 0; f < machine_factors.size(); ++f)
                em += machine_factors[f].energy(ml[f]);
            joint(i * d_m + j) = system.energy(i) + em;
        }

    const std::vector<int> labels = energy_group_labels(joint);
    const int n_groups = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<DegenerateSubspace> out(static_cast<size_t>(n_groups));
    for (int k = 0; k < d_s * d_m; ++k) {
        DegenerateSubspace& g = out[static_cast<size_t>(labels[static_cast<size_t>(k)])];
        g.indices.emplace_back(k / d_m, k % d_m);
        g.energy = joint(k);
    }
    for (DegenerateSubspace& g : out) {
        if (g.indices.size() == 1) {
            g.classification = DegeneracyClass::Singleton;
            continue;
        }
        bool same_system = true, same_machine = true;
        for (const auto& [i, j] : g.indices) {
            same_system &= (i == g.indices.front().first);
            same_machine &= (j == g.indices.front().second);
        }
        if (same_system)
            g.classification = DegeneracyClass::MachineOnly;
        else if (same_machine)
            g.classification = DegeneracyClass::SystemOnly;
        else
            g.classification = DegeneracyClass::Mixed;
        // A machine without a tensor split can only be heated whole, which
        // never cools; mixed subspaces of split machines stay candidates.
        g.potentially_useful =
            g.classification == DegeneracyClass::Mixed && machine_factors.size() >= 2;
    }
    std::sort(out.begin(), out.end(),
              [](const DegenerateSubspace& a, const DegenerateSubspace& b) {
                  return a.energy < b.energy;
              });
    return out;
}

std::vector<DegenerateSubspace> enumerate_degeneracies(const Hamiltonian& system,
                                                       const Hamiltonian& machine) {
    return enumerate_degeneracies(system, std::vector<Hamiltonian>{machine});
}

IncoherentCycleRunner::IncoherentCycleRunner(Hamiltonian system,
                                             std::vector<Hamiltonian> machine_factors,
                                             BathAssignment assignment, Beta beta_r, Beta beta_h,
                                             bool naive_accounting)
    : system_(std::move(system)),
      factors_(std::move(machine_factors)),
      assignment_(std::move(assignment)),
      beta_r_(beta_r),
      beta_h_(beta_h),
      naive_(naive_accounting) {
    assignment_.validate(static_cast<int>(factors_.size()));
    if (beta_h.value() > beta_r.value())
        throw UnsupportedError("hot bath must not be colder than the room bath");
    space_.dims.push_back(system_.dim());
    for (const Hamiltonian& f : factors_)
        space_.dims.push_back(f.dim());
    if (space_.total_dim() > 64)
        throw UnsupportedError("joint dimension above 64 is out of scope");
    joint_energies_ = multi_joint_energies(system_, factors_);
    for (const Hamiltonian& f : factors_)
        hot_marginals_.push_back(gibbs_populations(f, beta_r_));
}

Vec IncoherentCycleRunner::machine_populations() const {
    Vec m(1);
    m << 1.0;
    for (size_t f = 0; f < factors_.size(); ++f) {
        const Beta beta = assignment_.is_hot(static_cast<int>(f)) ? beta_h_ : beta_r_;
        m = tensor_diag(m, gibbs_populations(factors_[f], beta));
    }
    return m;
}

IncoherentCycleResult IncoherentCycleRunner::step(const Vec& sigma, const Mat& u) {
    validate_populations(sigma);
    if (!commutes_with_hamiltonian(u, joint_energies_))
        throw UnsupportedError("incoherent cycle requires an energy-conserving unitary");

    // Heat drawn to rethermalize the hot factors from whatever the previous
    // cycle left there.
    double heat = 0.0;
    for (size_t f = 0; f < factors_.size(); ++f) {
        if (!assignment_.is_hot(static_cast<int>(f)))
            continue;
        const Vec hot = gibbs_populations(factors_[f], beta_h_);
        const Vec prev =
            naive_ ? gibbs_populations(factors_[f], beta_r_) : hot_marginals_[f];
        heat += (hot - prev).dot(factors_[f].energies());
    }

    const Vec joint_before = tensor_diag(sigma, machine_populations());
    Vec joint_after = u.cwiseAbs2() * joint_before;
    // Keep long cycle chains exactly normalized against rounding drift.
    joint_after /= joint_after.sum();

    IncoherentCycleResult out;
    out.sigma_out = space_.marginal(joint_after, 0);
    out.heat_drawn = heat;
    total_heat_ += heat;
    for (size_t f = 0; f < factors_.size(); ++f)
        if (assignment_.is_hot(static_cast<int>(f)))
            hot_marginals_[f] = space_.marginal(joint_after, static_cast<int>(f) + 1);
    return out;
}

IncoherentCycleResult incoherent_cycle(const Hamiltonian& system,
                                       const std::vector<Hamiltonian>& machine_factors,
                                       const BathAssignment& assignment, Beta beta_r, Beta beta_h,
                                       const Vec& sigma, const Mat& u) {
    IncoherentCycleRunner runner(system, machine_factors, assignment, beta_r, beta_h);
    return runner.step(sigma, u);
}

VirtualQubit virtual_qubit(double m1_gap, double m2_gap, Beta beta_r, Beta beta_h) {
    const double r_m1 = gibbs_populations(Hamiltonian::qubit(m1_gap), beta_r)(0);
    const double r_m2_hot = gibbs_populations(Hamiltonian::qubit(m2_gap), beta_h)(0);
    VirtualQubit v;
    v.norm = r_m1 * (1.0 - r_m2_hot) + (1.0 - r_m1) * r_m2_hot;
    v.ground_pop = r_m1 * (1.0 - r_m2_hot) / v.norm;
    v.gap = m1_gap - m2_gap;
    return v;
}

IncoherentClosedForm two_qubit_incoherent_closed_form(const TwoQubitParams& params, Beta beta_h,
                                                      int n) {
    if (std::abs(params.m1_gap - (params.system_gap + params.m2_gap)) > 1e-9)
        throw UnsupportedError("two-qubit machine requires m1_gap = system_gap + m2_gap");
    if (beta_h.value() > params.beta_r.value())
        throw UnsupportedError("hot bath must not be colder than the room bath");
    if (params.beta_r.value() <= 0)
        throw UnsupportedError("room temperature must be finite");

    const double r_s = gibbs_populations(Hamiltonian::qubit(params.system_gap), params.beta_r)(0);
    const double r_m2 = gibbs_populations(Hamiltonian::qubit(params.m2_gap), params.beta_r)(0);
    const double r_m2_hot = gibbs_populations(Hamiltonian::qubit(params.m2_gap), beta_h)(0);
    const VirtualQubit v = virtual_qubit(params.m1_gap, params.m2_gap, params.beta_r, beta_h);

    IncoherentClosedForm out;
    const double carnot = 1.0 - beta_h.value() / params.beta_r.value();
    if (n < 0) {
        out.r_n = v.ground_pop;
        out.delta_f_n =
            params.m2_gap * (r_m2 - r_m2_hot + v.ground_pop - r_s) * carnot;
    } else {
        out.r_n = v.ground_pop + std::pow(1.0 - v.norm, n) * (r_s - v.ground_pop);
        const double r_prev =
            v.ground_pop + std::pow(1.0 - v.norm, std::max(n - 1, 0)) * (r_s - v.ground_pop);
        out.delta_f_n =
            n == 0 ? 0.0 : params.m2_gap * (r_m2 - r_m2_hot + r_prev - r_s) * carnot;
    }
    out.t_n = out.r_n == 0.5 ? std::numeric_limits<double>::infinity()
                             : qubit_temperature_from_ground_pop(params.system_gap, out.r_n);
    return out;
}

double two_qubit_incoherent_limit_temperature(const TwoQubitParams& params, Beta beta_h) {
    const double denom = params.m1_gap * params.beta_r.value() - params.m2_gap * beta_h.value();
    if (denom <= 0)
        return std::numeric_limits<double>::infinity();
    return params.system_gap / denom;
}

ExtendedMachine extended_machine(const Hamiltonian& system, const Hamiltonian& machine) {
    ExtendedMachine out;
    out.factors.push_back(machine);
    const double e_max = machine.max_energy();
    for (int i = 1; i < system.dim(); ++i) {
        const double gap = e_max - (system.energy(i) - system.energy(i - 1));
        if (gap < 0)
            throw UnsupportedError("system gap exceeds the machine's maximal gap");
        out.bridge_gaps.push_back(gap);
        out.factors.push_back(Hamiltonian::qubit(gap));
    }
    return out;
}

namespace {

MaxSwapOutcome max_swap_apply(const Vec& sigma, const Hamiltonian& system,
                              const Hamiltonian& machine, const ExtendedMachine& ext, Beta beta_r,
                              Beta beta_h) {
    validate_populations(sigma);
    if (beta_h.value() > beta_r.value())
        throw UnsupportedError("hot bath must not be colder than the room bath");
    const Vec tau_m = gibbs_populations(machine, beta_r);
    const int d_m = machine.dim();
    const int d_s = system.dim();

    MaxSwapOutcome out;
    out.populations = sigma;
    for (int i = 1; i < d_s; ++i) {
        const Vec tau_q = gibbs_populations(ext.factors[static_cast<size_t>(i)], beta_h);
        const double gain =
            sigma(i) * tau_m(0) * tau_q(1) - sigma(i - 1) * tau_m(d_m - 1) * tau_q(0);
        if (gain > out.gain) {
            out.gain = gain;
            out.swapped_level = i;
        }
    }
    if (out.swapped_level > 0) {
        out.populations(out.swapped_level - 1) += out.gain;
        out.populations(out.swapped_level) -= out.gain;
    }
    return out;
}

} // namespace

Vec incoherent_max_swap_step(const Vec& sigma, const Hamiltonian& system,
                             const Hamiltonian& machine, Beta beta_r, Beta beta_h) {
    const ExtendedMachine ext = extended_machine(system, machine);
    return max_swap_apply(sigma, system, machine, ext, beta_r, beta_h).populations;
}

MaxSwapRunner::MaxSwapRunner(Hamiltonian system, Hamiltonian machine, Beta beta_r, Beta beta_h)
    : system_(std::move(system)),
      machine_(std::move(machine)),
      beta_r_(beta_r),
      beta_h_(beta_h),
      extended_(extended_machine(system_, machine_)) {
    if (beta_h.value() > beta_r.value())
        throw UnsupportedError("hot bath must not be colder than the room bath");
}

MaxSwapOutcome MaxSwapRunner::step(const Vec& sigma) {
    MaxSwapOutcome out = max_swap_apply(sigma, system_, machine_, extended_, beta_r_, beta_h_);
    if (first_) {
        // Every bridge qubit is heated from the room temperature once.
        for (size_t i = 1; i < extended_.factors.size(); ++i) {
            const Hamiltonian& q = extended_.factors[i];
            out.heat_drawn +=
                (gibbs_populations(q, beta_h_) - gibbs_populations(q, beta_r_)).dot(q.energies());
        }
        first_ = false;
    } else if (last_swapped_ > 0) {
        // Only the qubit used by the previous swap left equilibrium; the
        // swap moved `gain` of its excited population to the ground level.
        out.heat_drawn +=
            last_gain_ * extended_.bridge_gaps[static_cast<size_t>(last_swapped_ - 1)];
    }
    last_swapped_ = out.swapped_level;
    last_gain_ = out.gain;
    total_heat_ += out.heat_drawn;
    return out;
}

double MaxSwapRunner::total_delta_f() const {
    return total_heat_ * (1.0 - beta_h_.value() / beta_r_.value());
}

} // namespace qtherm
