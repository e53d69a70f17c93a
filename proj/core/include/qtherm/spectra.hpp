#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "qtherm/errors.hpp"

namespace qtherm {

using Vec = Eigen::VectorXd;

inline constexpr double kProbTol = 1e-12;
inline constexpr double kDegeneracyTol = 1e-9;
inline constexpr double kMajorizationTol = 1e-10;

/// Energy eigenvalues of a finite-dimensional system, sorted increasing and
/// shifted so the ground energy is zero. The shift applied at construction is
/// kept so reports can show the original energies. Units k_B = hbar = 1.
class Hamiltonian {
  public:
    explicit Hamiltonian(std::vector<double> energies);
    explicit Hamiltonian(const Vec& energies);
    Hamiltonian(std::initializer_list<double> energies)
        : Hamiltonian(std::vector<double>(energies)) {}

    /// Convenience for a two-level system with the given gap.
    static Hamiltonian qubit(double gap);

    int dim() const { return static_cast<int>(energies_.size()); }
    const Vec& energies() const { return energies_; }
    double energy(int i) const { return energies_(i); }
    double max_energy() const { return energies_(dim() - 1); }
    /// Gap of a two-level system; throws for other dimensions.
    double gap() const;
    /// Amount subtracted from the input energies so that E_0 = 0.
    double ground_shift() const { return shift_; }

  private:
    Vec energies_;
    double shift_ = 0.0;
};

/// Inverse temperature beta = 1/T. beta = 0 is infinite temperature and
/// beta = +inf is zero temperature; both are legal values.
class Beta {
  public:
    Beta() : value_(0.0) {}
    explicit Beta(double beta);
    static Beta from_temperature(double t);
    static Beta infinite() { return Beta(std::numeric_limits<double>::infinity()); }

    double value() const { return value_; }
    bool is_zero_temperature() const { return std::isinf(value_); }
    double temperature() const;

  private:
    double value_;
};

/// Throws unless v is entrywise in [0,1] and sums to 1, both within kProbTol.
void validate_populations(const Vec& v, double tol = kProbTol);

/// Thermal populations exp(-beta E_i)/Z. The minimum energy is subtracted
/// before exponentiating, so arbitrarily shifted spectra are safe. beta = 0
/// gives the uniform distribution; beta = +inf puts mass 1/m on each of the m
/// ground-degenerate levels (degeneracy tolerance kDegeneracyTol).
Vec gibbs_populations(const Hamiltonian& h, Beta beta);

/// Temperature of a qubit with the given gap from its ground population r,
/// T = gap / ln(r/(1-r)). r = 1/2 gives +inf; r < 1/2 gives a negative
/// temperature (population inversion). r in {0,1} is rejected.
double qubit_temperature_from_ground_pop(double gap, double r);

/// Sum p_i E_i.
double average_energy(const Vec& populations, const Hamiltonian& h);

/// -sum p_i ln p_i in nats, with 0 ln 0 = 0.
double shannon_entropy(const Vec& populations);

} // namespace qtherm
