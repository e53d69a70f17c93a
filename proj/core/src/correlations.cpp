#include "qtherm/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace qtherm {

namespace {

double entropy_of_spectrum(const Vec& lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda(i) > 1e-300)
            s -= lambda(i) * std::log(lambda(i));
    return s;
}

double entropy_of_state(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    Vec lam = es.eigenvalues().cwiseMax(0.0);
    return entropy_of_spectrum(lam);
}

std::vector<std::vector<int>> all_permutations(int d) {
    std::vector<int> base(static_cast<size_t>(d));
    std::iota(base.begin(), base.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

} // namespace

RMat cyclic_shift(int d) {
    RMat pi = RMat::Zero(d, d);
    for (int i = 0; i < d; ++i)
        pi(i, (i - 1 + d) % d) = 1.0;
    return pi;
}

int free_block_count(int d) {
    return d % 2 == 0 ? d / 2 : (d - 1) / 2;
}

BlockDecomposition latin_blocks(const Hamiltonian& h, Beta beta) {
    const int d = h.dim();
    const Vec p = gibbs_populations(h, beta);
    BlockDecomposition out;
    out.d = d;
    for (int i = 0; i < d; ++i) {
        std::vector<int> block(static_cast<size_t>(d));
        Vec r(d);
        for (int j = 0; j < d; ++j) {
            const int col = (j + i) % d;
            block[static_cast<size_t>(j)] = j * d + col;
            r(j) = p(j) * p(col);
        }
        out.blocks.push_back(std::move(block));
        out.block_vectors.push_back(std::move(r));
    }
    return out;
}

std::vector<Vec> target_blocks(const Hamiltonian& h, Beta beta_prime) {
    return latin_blocks(h, beta_prime).block_vectors;
}

Vec marginal_transform(const BlockDecomposition& blocks, const std::vector<RMat>& ms, int d) {
    const int k = free_block_count(d);
    if (static_cast<int>(ms.size()) != k + 1)
        throw UnsupportedError("marginal transform expects k + 1 block matrices");
    for (const RMat& m : ms)
        validate_doubly_stochastic(m);
    const RMat pi = cyclic_shift(d);
    Vec out = ms[0] * blocks.block_vectors[0];
    RMat pi_pow = RMat::Identity(d, d);
    for (int i = 1; i <= k; ++i) {
        pi_pow = pi_pow * pi;
        const double pref = 1.0 / (1 + (2 * i) / d);
        out += pref * (RMat::Identity(d, d) + pi_pow) * ms[static_cast<size_t>(i)] *
               blocks.block_vectors[static_cast<size_t>(i)];
    }
    if (std::abs(out.sum() - 1.0) > 1e-10)
        throw InternalError("marginal transform lost normalization");
    return out;
}

std::vector<RMat> completed_block_matrices(const std::vector<RMat>& ms, int d) {
    const int k = free_block_count(d);
    if (static_cast<int>(ms.size()) != k + 1)
        throw UnsupportedError("expected k + 1 block matrices");
    const RMat pi = cyclic_shift(d);
    std::vector<RMat> applied(static_cast<size_t>(d));
    applied[0] = ms[0];
    for (int i = 1; i <= k; ++i) {
        RMat pi_i = RMat::Identity(d, d);
        for (int t = 0; t < i; ++t)
            pi_i = pi_i * pi;
        if (d % 2 == 0 && i == k) {
            // Middle block of even dimension: symmetrize so that both
            // marginals receive the same contribution.
            applied[static_cast<size_t>(i)] =
                0.5 * (RMat::Identity(d, d) + pi_i) * ms[static_cast<size_t>(i)];
        } else {
            applied[static_cast<size_t>(i)] = ms[static_cast<size_t>(i)];
            applied[static_cast<size_t>(d - i)] =
                pi_i * ms[static_cast<size_t>(i)] * pi_i.transpose();
        }
    }
    return applied;
}

double mutual_information(const Mat& rho, const JointIndex& idx) {
    const double s_ab = entropy_of_state(rho);
    const double s_a = entropy_of_state(partial_trace(rho, idx, Side::Left));
    const double s_b = entropy_of_state(partial_trace(rho, idx, Side::Right));
    return s_a + s_b - s_ab;
}

JaynesBound jaynes_bound(const Hamiltonian& h_a, const Hamiltonian& h_b, Beta beta_r, double c) {
    auto energy_at = [&](Beta b) {
        return average_energy(gibbs_populations(h_a, b), h_a) +
               average_energy(gibbs_populations(h_b, b), h_b);
    };
    auto entropy_at = [&](Beta b) {
        return shannon_entropy(gibbs_populations(h_a, b)) +
               shannon_entropy(gibbs_populations(h_b, b));
    };

    JaynesBound out{beta_r, 0.0, false, false};
    const double e_uniform = energy_at(Beta(0.0));
    const double e_initial = energy_at(beta_r);
    if (c >= e_uniform - 1e-12) {
        out.beta_c = Beta(0.0);
        out.bound = std::log(static_cast<double>(h_a.dim())) +
                    std::log(static_cast<double>(h_b.dim()));
        out.clamped_uniform = true;
        return out;
    }
    if (c < e_initial - 1e-12) {
        out.beta_c = beta_r;
        out.bound = entropy_at(beta_r);
        out.below_initial = true;
        return out;
    }

    // Energy is strictly decreasing in beta; bisect on [0, beta_r].
    double lo = 0.0;
    double hi = beta_r.value();
    if (std::isinf(hi)) {
        hi = 1.0;
        while (energy_at(Beta(hi)) > c && hi < 1e12)
            hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (energy_at(Beta(mid)) > c ? lo : hi) = mid;
    }
    out.beta_c = Beta(0.5 * (lo + hi));
    out.bound = entropy_at(out.beta_c);
    return out;
}

PureStateOptimum pure_state_optimum(const Hamiltonian& h_a, const Hamiltonian& h_b, double c) {
    if (!(c > 0))
        throw UnsupportedError("energy budget must be positive");
    const int d = std::min(h_a.dim(), h_b.dim());
    Vec combined(d);
    for (int i = 0; i < d; ++i)
        combined(i) = h_a.energy(i) + h_b.energy(i);

    auto gibbs_d = [&](double beta) {
        Vec w(d);
        for (int i = 0; i < d; ++i)
            w(i) = std::exp(-beta * (combined(i) - combined(0)));
        return Vec(w / w.sum());
    };
    auto energy_d = [&](double beta) { return gibbs_d(beta).dot(combined); };

    PureStateOptimum out;
    const double mean = combined.mean();
    double beta;
    if (c >= mean) {
        beta = 0.0;
    } else {
        // Bracket [0, 1e3 / gap]: at the cap the excited weights underflow,
        // so the energy there is below any representable positive budget.
        double gap = 0.0;
        for (int i = 1; i < d; ++i)
            if (combined(i) - combined(i - 1) > kDegeneracyTol) {
                gap = combined(i) - combined(i - 1);
                break;
            }
        const double cap = gap > 0 ? 1e3 / gap : 1e12;
        double lo = 0.0, hi = 1.0;
        while (energy_d(hi) > c && hi < cap)
            hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (energy_d(mid) > c ? lo : hi) = mid;
        }
        beta = 0.5 * (lo + hi);
    }
    out.beta_c = Beta(beta);
    const Vec w = gibbs_d(beta);
    out.marginal_a = Vec::Zero(h_a.dim());
    out.marginal_b = Vec::Zero(h_b.dim());
    out.marginal_a.head(d) = w;
    out.marginal_b.head(d) = w;
    out.info = 2.0 * shannon_entropy(w);
    return out;
}

CommuteThrough commute_through(const RMat& m) {
    const int d = static_cast<int>(m.rows());
    const RMat lhs = m * (RMat::Identity(d, d) + cyclic_shift(d));
    const RMat one_plus_pi = RMat::Identity(d, d) + cyclic_shift(d);

    // Unknowns: X entries (row-major), X >= 0. Equations: (1+Pi) X = M (1+Pi)
    // entrywise plus unit row and column sums.
    const int nv = d * d;
    const int ne = d * d + 2 * d;
    RMat a = RMat::Zero(ne, nv);
    Vec b = Vec::Zero(ne);
    int row = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j, ++row) {
            for (int k = 0; k < d; ++k)
                a(row, k * d + j) = one_plus_pi(i, k);
            b(row) = lhs(i, j);
        }
    for (int i = 0; i < d; ++i, ++row) {
        for (int j = 0; j < d; ++j)
            a(row, i * d + j) = 1.0;
        b(row) = 1.0;
    }
    for (int j = 0; j < d; ++j, ++row) {
        for (int i = 0; i < d; ++i)
            a(row, i * d + j) = 1.0;
        b(row) = 1.0;
    }

    const lp::Result res = lp::feasible_point(a, b);
    CommuteThrough out;
    if (res.feasible) {
        out.feasible = true;
        out.m_tilde = RMat::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out.m_tilde(i, j) = res.x(i * d + j);
        return out;
    }
    out.farkas = res.farkas;
    const double scale = res.farkas.norm();
    out.violation = res.farkas.dot(b) / (scale > 0 ? scale : 1.0);
    return out;
}

StuCertificate stu_d3_majorized_marginal(const Hamiltonian& h, Beta beta_r, Beta beta_prime) {
    if (h.dim() != 3)
        throw UnsupportedError("majorized marginal approach is specific to d = 3");
    if (beta_prime.value() > beta_r.value())
        throw UnsupportedError("target temperature must not be colder than the background");

    const Vec p = gibbs_populations(h, beta_r);
    const Vec target = gibbs_populations(h, beta_prime);
    const RMat m0 = horn_transfer(target, p).matrix;

    // M_0 (1 + Pi) = (1 + Pi) M_1 solved permutation by permutation through
    // the Birkhoff decomposition.
    RMat m1 = RMat::Zero(3, 3);
    for (const BirkhoffTerm& term : birkhoff_decompose(m0)) {
        const CommuteThrough ct = commute_through(permutation_matrix(term.permutation));
        if (!ct.feasible)
            throw InternalError("commute-through is always solvable for d = 3");
        m1 += term.weight * ct.m_tilde;
    }

    StuCertificate cert;
    cert.matrices = {m0, m1};
    const BlockDecomposition blocks = latin_blocks(h, beta_r);
    cert.achieved_marginal = marginal_transform(blocks, cert.matrices, 3);
    cert.residual = (cert.achieved_marginal - target).cwiseAbs().maxCoeff();
    return cert;
}

StuCertificate stu_passing_norm(const Hamiltonian& h, Beta beta_r, Beta beta_prime) {
    const int d = h.dim();
    if (d < 2 || d > 4)
        throw UnsupportedError("passing-norm construction supports d in {2, 3, 4}");
    if (beta_prime.value() > beta_r.value())
        throw UnsupportedError("target temperature must not be colder than the background");
    if (d == 4) {
        for (int i = 0; i + 2 < d; ++i) {
            const double gap_i = h.energy(i + 1) - h.energy(i);
            const double gap_next = h.energy(i + 2) - h.energy(i + 1);
            if (gap_next > gap_i + 1e-12)
                throw UnsupportedError(
                    "passing-norm at d = 4 requires non-increasing gaps; use the geometric route");
        }
    }

    const BlockDecomposition blocks = latin_blocks(h, beta_r);
    const std::vector<Vec> b = target_blocks(h, beta_prime);
    const int k = free_block_count(d);
    const RMat pi = cyclic_shift(d);

    std::vector<double> nr(static_cast<size_t>(k) + 1), nb(static_cast<size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        nr[static_cast<size_t>(i)] = blocks.block_vectors[static_cast<size_t>(i)].sum();
        nb[static_cast<size_t>(i)] = b[static_cast<size_t>(i)].sum();
    }

    std::vector<RMat> ms(static_cast<size_t>(k) + 1);
    // Per-block transfers onto the rescaled targets.
    for (int i = 1; i <= k; ++i) {
        const Vec target =
            (nr[static_cast<size_t>(i)] / nb[static_cast<size_t>(i)]) * b[static_cast<size_t>(i)];
        ms[static_cast<size_t>(i)] = horn_transfer(target, blocks.block_vectors[static_cast<size_t>(i)]).matrix;
    }

    // The main block donates its excess norm to the symmetrized targets.
    std::vector<double> alpha;
    std::vector<RMat> pieces;
    alpha.push_back(nb[0] / nr[0]);
    pieces.push_back(horn_transfer((nr[0] / nb[0]) * b[0], blocks.block_vectors[0]).matrix);
    RMat pi_i = RMat::Identity(d, d);
    for (int i = 1; i <= k; ++i) {
        pi_i = pi_i * pi;
        const bool halved = d % 2 == 0 && i == k;
        const double deficit = nb[static_cast<size_t>(i)] - nr[static_cast<size_t>(i)];
        alpha.push_back((halved ? 1.0 : 2.0) * deficit / nr[0]);
        const Vec sym_target =
            (nr[0] / (2.0 * nb[static_cast<size_t>(i)])) * (RMat::Identity(d, d) + pi_i) *
            b[static_cast<size_t>(i)];
        pieces.push_back(horn_transfer(sym_target, blocks.block_vectors[0]).matrix);
    }
    double alpha_sum = 0.0;
    RMat m0 = RMat::Zero(d, d);
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < -1e-12)
            throw InternalError("passing-norm weights turned negative");
        const double w = std::max(alpha[i], 0.0);
        alpha_sum += w;
        m0 += w * pieces[i];
    }
    if (std::abs(alpha_sum - 1.0) > 1e-12)
        throw InternalError("passing-norm weights do not sum to one");
    ms[0] = m0;

    StuCertificate cert;
    cert.matrices = std::move(ms);
    cert.achieved_marginal = marginal_transform(blocks, cert.matrices, d);
    cert.residual =
        (cert.achieved_marginal - gibbs_populations(h, beta_prime)).cwiseAbs().maxCoeff();
    return cert;
}

Vec simplex_coordinates(const Vec& p) {
    const int d = static_cast<int>(p.size());
    Vec x(d - 1);
    double prefix = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
        prefix += p(i);
        x(i) = (i + 1) * p(i + 1) - prefix;
    }
    return x;
}

Vec simplex_to_populations(const Vec& x) {
    const int d = static_cast<int>(x.size()) + 1;
    RMat b = RMat::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
        for (int j = 0; j <= i; ++j)
            b(i, j) = -1.0;
        b(i, i + 1) = i + 1.0;
    }
    for (int j = 0; j < d; ++j)
        b(d - 1, j) = -1.0;
    Vec rhs(d);
    rhs.head(d - 1) = x;
    rhs(d - 1) = -1.0;
    return b.partialPivLu().solve(rhs);
}

namespace {

// Per-block images of every permutation, prefactors included: the marginal
// of a vertex tuple is the sum of one image per block.
std::vector<std::vector<Vec>> block_permutation_images(const BlockDecomposition& blocks,
                                                       const std::vector<std::vector<int>>& perms,
                                                       int d) {
    const int k = free_block_count(d);
    const RMat pi = cyclic_shift(d);
    std::vector<std::vector<Vec>> images(static_cast<size_t>(k) + 1);
    RMat pi_i = RMat::Identity(d, d);
    for (int i = 0; i <= k; ++i) {
        RMat mixer = RMat::Identity(d, d);
        if (i > 0) {
            pi_i = pi_i * pi;
            const double pref = 1.0 / (1 + (2 * i) / d);
            mixer = pref * (RMat::Identity(d, d) + pi_i);
        }
        for (const std::vector<int>& p : perms)
            images[static_cast<size_t>(i)].push_back(
                mixer * (permutation_matrix(p) * blocks.block_vectors[static_cast<size_t>(i)]));
    }
    return images;
}

struct WaypointRealization {
    std::vector<std::array<int, 3>> tuples;
    std::vector<double> weights;
};

// Exact membership of `target` (x-coordinates) in the hull of the given
// tuple set, greedily expanded Frank-Wolfe style before the exact LP.
WaypointRealization realize_waypoint(const Vec& target,
                                     const std::vector<std::vector<Vec>>& images, int d,
                                     const std::vector<std::array<int, 3>>& candidates) {
    const int k = free_block_count(d);
    std::vector<Vec> coords(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        Vec m = images[0][static_cast<size_t>(candidates[i][0])];
        for (int blk = 1; blk <= k; ++blk)
            m += images[static_cast<size_t>(blk)]
                       [static_cast<size_t>(candidates[i][static_cast<size_t>(blk)])];
        coords[i] = simplex_coordinates(m);
    }

    // Greedy expansion: start at the closest vertex, then repeatedly add the
    // vertex with the strongest pull toward the target.
    std::vector<int> active;
    int start = 0;
    double best_d = (coords[0] - target).norm();
    for (size_t i = 1; i < coords.size(); ++i) {
        const double dist = (coords[i] - target).norm();
        if (dist < best_d) {
            best_d = dist;
            start = static_cast<int>(i);
        }
    }
    active.push_back(start);
    Vec current = coords[static_cast<size_t>(start)];
    std::vector<char> in_active(candidates.size(), 0);
    in_active[static_cast<size_t>(start)] = 1;
    for (int round = 0; round < 64 && (current - target).norm() > 1e-12; ++round) {
        const Vec dir = target - current;
        int pick = -1;
        double best_score = -1e100;
        for (size_t i = 0; i < coords.size(); ++i) {
            const double score = dir.dot(coords[i]);
            if (score > best_score) {
                best_score = score;
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0)
            break;
        if (!in_active[static_cast<size_t>(pick)]) {
            in_active[static_cast<size_t>(pick)] = 1;
            active.push_back(pick);
        }
        const Vec v = coords[static_cast<size_t>(pick)];
        const double denom = (v - current).squaredNorm();
        if (denom < 1e-30)
            break;
        const double gamma = std::clamp(dir.dot(v - current) / denom, 0.0, 1.0);
        current += gamma * (v - current);
    }

    std::vector<Vec> active_coords;
    for (int idx : active)
        active_coords.push_back(coords[static_cast<size_t>(idx)]);
    PolytopeMembership mem = polytope_membership(target, active_coords);
    if (!mem.inside) {
        // Fall back to the full candidate list before giving up.
        mem = polytope_membership(target, coords);
        if (!mem.inside)
            throw InternalError("waypoint lies outside the transform polytope");
        active.clear();
        for (size_t i = 0; i < candidates.size(); ++i)
            active.push_back(static_cast<int>(i));
    }

    WaypointRealization out;
    for (size_t i = 0; i < active.size(); ++i) {
        if (mem.weights(static_cast<Eigen::Index>(i)) > 1e-14) {
            out.tuples.push_back(candidates[static_cast<size_t>(active[i])]);
            out.weights.push_back(mem.weights(static_cast<Eigen::Index>(i)));
        }
    }
    return out;
}

} // namespace

StuCertificate stu_geometric(const Hamiltonian& h, Beta beta_r, Beta beta_prime) {
    const int d = h.dim();
    if (d != 3 && d != 4)
        throw UnsupportedError("geometric construction supports d in {3, 4}");
    if (beta_prime.value() > beta_r.value())
        throw UnsupportedError("target temperature must not be colder than the background");

    const BlockDecomposition blocks = latin_blocks(h, beta_r);
    const Vec target_pop = gibbs_populations(h, beta_prime);
    const Vec x_target = simplex_coordinates(target_pop);
    const Vec x_background = simplex_coordinates(gibbs_populations(h, beta_r));
    const int k = free_block_count(d);

    // Waypoint weights: coordinate i of the staircase combination equals
    // (sum of the first i+1 weights) x_background(i).
    std::vector<double> cumulative(static_cast<size_t>(d) - 1);
    double prev = 0.0;
    for (int i = 0; i < d - 1; ++i) {
        double l;
        if (std::abs(x_background(i)) < 1e-13) {
            if (std::abs(x_target(i)) > 1e-10)
                throw InternalError("degenerate coordinate with a non-degenerate target");
            l = prev;
        } else {
            l = x_target(i) / x_background(i);
        }
        l = std::clamp(l, prev, 1.0);
        cumulative[static_cast<size_t>(i)] = l;
        prev = l;
    }
    std::vector<double> lambda(static_cast<size_t>(d), 0.0);
    lambda[0] = cumulative[0];
    for (int m = 1; m < d - 1; ++m)
        lambda[static_cast<size_t>(m)] =
            cumulative[static_cast<size_t>(m)] - cumulative[static_cast<size_t>(m - 1)];
    lambda[static_cast<size_t>(d - 1)] = 1.0 - cumulative[static_cast<size_t>(d - 2)];

    const std::vector<std::vector<int>> perms = all_permutations(d);
    const std::vector<std::vector<Vec>> images = block_permutation_images(blocks, perms, d);
    const int identity_index = 0; // lexicographic order starts at the identity
    std::vector<int> cycle_indices; // indices of the cyclic powers in perms
    {
        const RMat pi = cyclic_shift(d);
        RMat pw = RMat::Identity(d, d);
        for (int c = 0; c < d; ++c) {
            std::vector<int> as_perm(static_cast<size_t>(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (pw(i, j) > 0.5)
                        as_perm[static_cast<size_t>(i)] = j;
            for (size_t q = 0; q < perms.size(); ++q)
                if (perms[q] == as_perm)
                    cycle_indices.push_back(static_cast<int>(q));
            pw = pw * pi;
        }
    }

    // Accumulate the block matrices over waypoints x tuples.
    std::vector<RMat> ms(static_cast<size_t>(k) + 1, RMat::Zero(d, d));
    auto add_tuple = [&](const std::array<int, 3>& t, double w) {
        for (int i = 0; i <= k; ++i)
            ms[static_cast<size_t>(i)] +=
                w * permutation_matrix(perms[static_cast<size_t>(t[static_cast<size_t>(i)])]);
    };

    for (int m = 0; m < d; ++m) {
        const double w = lambda[static_cast<size_t>(m)];
        if (w < 1e-15)
            continue;
        if (m == 0) {
            add_tuple({identity_index, identity_index, identity_index}, w);
            continue;
        }
        if (m == d - 1) {
            // Uniform waypoint: average of the simultaneous cyclic shifts.
            for (int c = 0; c < d; ++c)
                add_tuple({cycle_indices[static_cast<size_t>(c)],
                           cycle_indices[static_cast<size_t>(c)],
                           cycle_indices[static_cast<size_t>(c)]},
                          w / d);
            continue;
        }
        // Interior waypoint in x-coordinates.
        Vec v(d - 1);
        for (int i = 0; i < d - 1; ++i)
            v(i) = i < m ? 0.0 : x_background(i);

        std::vector<std::array<int, 3>> candidates;
        if (d == 3) {
            // Cyclic permutations on the r_1 block suffice.
            for (int a = 0; a < 6; ++a)
                for (int c : cycle_indices)
                    candidates.push_back({a, c, 0});
        } else {
            candidates.reserve(perms.size() * perms.size() * perms.size());
            for (size_t a = 0; a < perms.size(); ++a)
                for (size_t b = 0; b < perms.size(); ++b)
                    for (size_t c = 0; c < perms.size(); ++c)
                        candidates.push_back(
                            {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)});
        }
        const WaypointRealization real = realize_waypoint(v, images, d, candidates);
        for (size_t t = 0; t < real.tuples.size(); ++t)
            add_tuple(real.tuples[t], w * real.weights[t]);
    }

    StuCertificate cert;
    cert.matrices = std::move(ms);
    cert.achieved_marginal = marginal_transform(blocks, cert.matrices, d);
    cert.residual = (cert.achieved_marginal - target_pop).cwiseAbs().maxCoeff();
    return cert;
}

Mat build_stu_unitary(const StuCertificate& cert, const BlockDecomposition& blocks) {
    if (cert.residual >= 1e-9)
        throw UnsupportedError("certificate residual too large to assemble a unitary");
    const int d = blocks.d;
    const std::vector<RMat> applied = completed_block_matrices(cert.matrices, d);

    Mat u = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i) {
        const Vec& r = blocks.block_vectors[static_cast<size_t>(i)];
        const Vec image = applied[static_cast<size_t>(i)] * r;
        // T-transform product targeting the block image; its rotation
        // witness is unistochastic by construction.
        const HornTransfer chain = horn_transfer(image, r);
        const RMat block_u = horn_unitary(chain, d);
        const std::vector<int>& basis = blocks.blocks[static_cast<size_t>(i)];
        for (int a = 0; a < d; ++a)
            for (int bcol = 0; bcol < d; ++bcol)
                u(basis[static_cast<size_t>(a)], basis[static_cast<size_t>(bcol)]) =
                    block_u(a, bcol);
    }
    validate_unitary(u);
    return u;
}

TriangleCheck thermal_marginal_triangle_check(const Hamiltonian& h_a, const Hamiltonian& h_b,
                                              Beta beta_r, Beta beta_prime) {
    TriangleCheck out;
    out.lhs = std::abs(shannon_entropy(gibbs_populations(h_a, beta_prime)) -
                       shannon_entropy(gibbs_populations(h_b, beta_prime)));
    out.rhs = shannon_entropy(gibbs_populations(h_a, beta_r)) +
              shannon_entropy(gibbs_populations(h_b, beta_r));
    out.feasible = out.lhs <= out.rhs + 1e-12;
    return out;
}

OracleResult brute_force_max_correlations(const Hamiltonian& h_a, const Hamiltonian& h_b,
                                          Beta beta_r, double c, int samples, std::uint64_t seed) {
    const int da = h_a.dim();
    const int db = h_b.dim();
    const int d = da * db;
    if (d > 16)
        throw UnsupportedError("oracle limited to joint dimension 16");
    const JointIndex idx{da, db};
    const Vec pops = tensor_diag(gibbs_populations(h_a, beta_r), gibbs_populations(h_b, beta_r));
    const Mat rho0 = diagonal_state(pops);
    auto [energies, idx2] = joint_hamiltonian(h_a, h_b);
    const double s_joint = shannon_entropy(pops); // conserved under unitaries

    auto evaluate = [&](const Mat& rho) {
        const double e = diag_of(rho).dot(energies);
        const double s_a = entropy_of_state(partial_trace(rho, idx, Side::Left));
        const double s_b = entropy_of_state(partial_trace(rho, idx, Side::Right));
        const double info = s_a + s_b - s_joint;
        return std::pair<double, double>(info, e);
    };

    OracleResult out;
    out.best_info = 0.0;
    out.best_energy = pops.dot(energies);
    const double penalty = 50.0;

    Mat best_u = Mat::Identity(d, d);
    double best_score = -1e100;
    for (int s = 0; s < samples; ++s) {
        const Mat u = haar_random_unitary(d, seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(s));
        const auto [info, e] = evaluate(apply_unitary(rho0, u));
        const double score = info - penalty * std::max(0.0, e - c);
        if (e <= c + 1e-9 && info > out.best_info) {
            out.best_info = info;
            out.best_energy = e;
        }
        if (score > best_score) {
            best_score = score;
            best_u = u;
        }
    }
    out.samples_used = samples;

    // Local refinement: sweep two-level rotations, shrinking the angle scale
    // whenever a full sweep stops improving. Every feasible state touched
    // along the way counts toward the reported best.
    Mat u = best_u;
    auto score_of = [&](const Mat& cand) {
        const auto [info, e] = evaluate(apply_unitary(rho0, cand));
        if (e <= c + 1e-9 && info > out.best_info) {
            out.best_info = info;
            out.best_energy = e;
        }
        return info - penalty * std::max(0.0, e - c);
    };
    double current = score_of(u);
    double scale = 0.4;
    for (int sweep = 0; sweep < 24 && scale > 2e-5; ++sweep) {
        bool improved = false;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                for (double mag : {scale, scale / 3.0, scale / 9.0}) {
                    for (double theta : {mag, -mag}) {
                        for (double phase : {0.0, M_PI_2}) {
                            Mat g = Mat::Identity(d, d);
                            const std::complex<double> ph(std::cos(phase), std::sin(phase));
                            g(p, p) = std::cos(theta);
                            g(q, q) = std::cos(theta);
                            g(p, q) = std::sin(theta) * ph;
                            g(q, p) = -std::sin(theta) * std::conj(ph);
                            const Mat cand = g * u;
                            const double sc = score_of(cand);
                            if (sc > current + 1e-13) {
                                current = sc;
                                u = cand;
                                improved = true;
                                ++out.descent_improvements;
                            }
                        }
                    }
                }
            }
        }
        if (!improved)
            scale /= 5.0;
    }

    // The penalty landscape pins the iterate where single rotations cannot
    // slide along the energy shell. Finish with a Lagrangian continuation:
    // bisect the multiplier and ascend the smooth score info - lambda * E,
    // projecting the shell crossing through the feasible-side bookkeeping in
    // score_of.
    auto lagrangian_ascent = [&](double lambda, Mat start) {
        auto smooth = [&](const Mat& cand) {
            const auto [info, e] = evaluate(apply_unitary(rho0, cand));
            if (e <= c + 1e-9 && info > out.best_info) {
                out.best_info = info;
                out.best_energy = e;
            }
            return info - lambda * e;
        };
        double value = smooth(start);
        double s = 0.2;
        for (int sweep = 0; sweep < 12 && s > 1e-4; ++sweep) {
            bool moved = false;
            for (int p = 0; p < d; ++p) {
                for (int q = p + 1; q < d; ++q) {
                    for (double mag : {s, s / 3.0}) {
                        for (double theta : {mag, -mag}) {
                            for (double phase : {0.0, M_PI_2}) {
                                Mat g = Mat::Identity(d, d);
                                const std::complex<double> ph(std::cos(phase), std::sin(phase));
                                g(p, p) = std::cos(theta);
                                g(q, q) = std::cos(theta);
                                g(p, q) = std::sin(theta) * ph;
                                g(q, p) = -std::sin(theta) * std::conj(ph);
                                Mat cand = g * start;
                                const double sc = smooth(cand);
                                if (sc > value + 1e-13) {
                                    value = sc;
                                    start = std::move(cand);
                                    moved = true;
                                }
                            }
                        }
                    }
                }
            }
            if (!moved)
                s /= 4.0;
        }
        return evaluate(apply_unitary(rho0, start)).second;
    };
    double lambda_lo = 0.02, lambda_hi = 64.0;
    for (int round = 0; round < 8; ++round) {
        const double lambda = std::sqrt(lambda_lo * lambda_hi);
        const double landed_e = lagrangian_ascent(lambda, u);
        (landed_e > c ? lambda_lo : lambda_hi) = lambda;
    }
    return out;
}

} // namespace qtherm
