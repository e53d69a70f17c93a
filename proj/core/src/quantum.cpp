#include "qtherm/quantum.hpp"

#include <cmath>
#include <random>
#include <algorithm>
#include <vector>

namespace qtherm {

void validate_density(const Mat& rho) {
    if (rho.rows() != rho.cols())
        throw UnsupportedError("density matrix must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
        throw UnsupportedError("density matrix not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > kProbTol || std::abs(rho.trace().imag()) > kProbTol)
        throw UnsupportedError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw UnsupportedError("density matrix has a negative eigenvalue");
}

void validate_unitary(const Mat& u) {
    if (u.rows() != u.cols())
        throw UnsupportedError("unitary must be square");
    Mat res = u * u.adjoint() - Mat::Identity(u.rows(), u.cols());
    if (res.cwiseAbs().maxCoeff() > kUnitaryTol)
        throw UnsupportedError("matrix is not unitary");
}

Mat diagonal_state(const Vec& populations) {
    validate_populations(populations);
    Mat rho = Mat::Zero(populations.size(), populations.size());
    for (Eigen::Index i = 0; i < populations.size(); ++i)
        rho(i, i) = populations(i);
    return rho;
}

Vec tensor_diag(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j)
            out(i * b.size() + j) = a(i) * b(j);
    return out;
}

std::pair<Vec, JointIndex> joint_hamiltonian(const Hamiltonian& h_left, const Hamiltonian& h_right) {
    JointIndex idx{h_left.dim(), h_right.dim()};
    Vec e(idx.dim());
    for (int i = 0; i < idx.d_left; ++i)
        for (int j = 0; j < idx.d_right; ++j)
            e(idx.flat(i, j)) = h_left.energy(i) + h_right.energy(j);
    return {e, idx};
}

Mat apply_unitary(const Mat& rho, const Mat& u) {
    if (rho.rows() != u.rows())
        throw UnsupportedError("state/unitary dimension mismatch");
    return u * rho * u.adjoint();
}

Mat partial_trace(const Mat& rho, const JointIndex& idx, Side keep) {
    if (rho.rows() != idx.dim())
        throw UnsupportedError("state dimension does not match joint index");
    const int dk = keep == Side::Left ? idx.d_left : idx.d_right;
    const int dt = keep == Side::Left ? idx.d_right : idx.d_left;
    Mat out = Mat::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b)
            for (int t = 0; t < dt; ++t) {
                if (keep == Side::Left)
                    out(a, b) += rho(idx.flat(a, t), idx.flat(b, t));
                else
                    out(a, b) += rho(idx.flat(t, a), idx.flat(t, b));
            }
    return out;
}

Vec diag_of(const Mat& rho) {
    Vec out(rho.rows());
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        const std::complex<double> z = rho(i, i);
        if (std::abs(z.imag()) >= kHermitianTol)
            throw UnsupportedError("diagonal entry has a non-real part");
        out(i) = z.real();
    }
    return out;
}

Mat haar_random_unitary(int d, std::uint64_t seed) {
    if (d < 1)
        throw UnsupportedError("dimension must be >= 1");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double re = dist(gen);
            const double im = dist(gen);
            g(i, j) = std::complex<double>(re, im);
        }
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phases of the R diagonal so the distribution is Haar.
    for (int j = 0; j < d; ++j) {
        std::complex<double> rjj = r(j, j);
        std::complex<double> phase = std::abs(rjj) > 0 ? rjj / std::abs(rjj) : 1.0;
        q.col(j) *= phase;
    }
    return q;
}

std::vector<int> energy_group_labels(const Vec& h_flat) {
    const int n = static_cast<int>(h_flat.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return h_flat(a) < h_flat(b); });
    std::vector<int> label(n, 0);
    int g = 0;
    for (int k = 1; k < n; ++k) {
        if (h_flat(order[k]) - h_flat(order[k - 1]) > kDegeneracyTol)
            ++g;
        label[order[k]] = g;
    }
    // Chained grouping: values closer than kDegeneracyTol to a neighbor share a group.
    return label;
}

bool commutes_with_hamiltonian(const Mat& u, const Vec& h_flat) {
    if (u.rows() != h_flat.size())
        throw UnsupportedError("unitary/Hamiltonian dimension mismatch");
    const std::vector<int> label = energy_group_labels(h_flat);
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j)
            if (label[i] != label[j] && std::abs(u(i, j)) > kUnitaryTol)
                return false;
    return true;
}

} // namespace qtherm
