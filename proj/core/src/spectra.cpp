#include "qtherm/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace qtherm {

Hamiltonian::Hamiltonian(std::vector<double> energies) {
    if (energies.size() < 2)
        throw UnsupportedError("Hamiltonian needs at least two levels");
    for (double e : energies)
        if (!std::isfinite(e))
            throw UnsupportedError("Hamiltonian energies must be finite");
    std::sort(energies.begin(), energies.end());
    shift_ = energies.front();
    energies_ = Eigen::Map<const Vec>(energies.data(), static_cast<Eigen::Index>(energies.size()));
    energies_.array() -= shift_;
}

Hamiltonian::Hamiltonian(const Vec& energies)
    : Hamiltonian(std::vector<double>(energies.data(), energies.data() + energies.size())) {}

Hamiltonian Hamiltonian::qubit(double gap) {
    if (gap < 0)
        throw UnsupportedError("qubit gap must be nonnegative");
    return Hamiltonian(std::vector<double>{0.0, gap});
}

double Hamiltonian::gap() const {
    if (dim() != 2)
        throw UnsupportedError("gap() is only defined for two-level systems");
    return energies_(1);
}

Beta::Beta(double beta) : value_(beta) {
    if (std::isnan(beta) || beta < 0)
        throw UnsupportedError("inverse temperature must be >= 0");
}

Beta Beta::from_temperature(double t) {
    if (std::isnan(t) || t < 0)
        throw UnsupportedError("temperature must be >= 0");
    if (t == 0)
        return Beta::infinite();
    if (std::isinf(t))
        return Beta(0.0);
    return Beta(1.0 / t);
}

double Beta::temperature() const {
    if (value_ == 0)
        return std::numeric_limits<double>::infinity();
    if (std::isinf(value_))
        return 0.0;
    return 1.0 / value_;
}

void validate_populations(const Vec& v, double tol) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v(i) >= -tol && v(i) <= 1.0 + tol))
            throw UnsupportedError("population entry out of [0,1]");
    if (std::abs(v.sum() - 1.0) > tol)
        throw UnsupportedError("populations do not sum to 1");
}

Vec gibbs_populations(const Hamiltonian& h, Beta beta) {
    const int d = h.dim();
    Vec p(d);
    if (beta.is_zero_temperature()) {
        // Uniform mass over the ground-degenerate levels.
        int m = 0;
        while (m < d && h.energy(m) <= h.energy(0) + kDegeneracyTol)
            ++m;
        p.setZero();
        for (int i = 0; i < m; ++i)
            p(i) = 1.0 / m;
        return p;
    }
    // Energies are stored with E_0 = 0 so the largest Boltzmann weight is 1.
    for (int i = 0; i < d; ++i)
        p(i) = std::exp(-beta.value() * (h.energy(i) - h.energy(0)));
    p /= p.sum();
    return p;
}

double qubit_temperature_from_ground_pop(double gap, double r) {
    if (!(gap > 0))
        throw UnsupportedError("qubit gap must be > 0");
    if (r <= 0.0 || r >= 1.0)
        throw UnsupportedError("ground population at 0 or 1 has unbounded temperature");
    if (r == 0.5)
        return std::numeric_limits<double>::infinity();
    return gap / std::log(r / (1.0 - r));
}

double average_energy(const Vec& populations, const Hamiltonian& h) {
    if (populations.size() != h.dim())
        throw UnsupportedError("population/Hamiltonian dimension mismatch");
    return populations.dot(h.energies());
}

double shannon_entropy(const Vec& populations) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < populations.size(); ++i) {
        const double p = populations(i);
        if (p > 0)
            s -= p * std::log(p);
    }
    return s;
}

} // namespace qtherm
