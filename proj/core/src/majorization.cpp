#include "qtherm/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {
constexpr double kChainTol = 1e-13;
} // namespace

void validate_doubly_stochastic(const RMat& m) {
    if (m.rows() != m.cols())
        throw UnsupportedError("doubly stochastic matrix must be square");
    if (m.minCoeff() < -1e-12)
        throw UnsupportedError("doubly stochastic matrix has a negative entry");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::abs(m.row(i).sum() - 1.0) > kStochasticTol)
            throw UnsupportedError("row sum differs from 1");
        if (std::abs(m.col(i).sum() - 1.0) > kStochasticTol)
            throw UnsupportedError("column sum differs from 1");
    }
}

std::vector<int> descending_order(const Vec& p) {
    std::vector<int> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p(a) > p(b); });
    return order;
}

Vec passive_sort(const Vec& p) {
    const std::vector<int> order = descending_order(p);
    Vec out(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i)
        out(i) = p(order[i]);
    return out;
}

MajorizationResult majorizes(const Vec& x, const Vec& y) {
    if (x.size() != y.size())
        throw UnsupportedError("majorization needs equal lengths");
    MajorizationResult res;
    if (std::abs(x.sum() - y.sum()) > 1e-9) {
        res.sum_mismatch = true;
        return res;
    }
    const Vec xs = passive_sort(x);
    const Vec ys = passive_sort(y);
    double px = 0.0, py = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        px += xs(i);
        py += ys(i);
        if (px < py - kMajorizationTol)
            return res;
    }
    res.holds = true;
    return res;
}

SumOrder sum_compare(const Vec& p, const Vec& q) {
    if (p.size() != q.size())
        throw UnsupportedError("sum_compare needs equal lengths");
    bool colder = true, hotter = true;
    double sp = 0.0, sq = 0.0;
    for (Eigen::Index i = 0; i + 1 < p.size(); ++i) {
        sp += p(i);
        sq += q(i);
        if (sp < sq - kMajorizationTol)
            colder = false;
        if (sq < sp - kMajorizationTol)
            hotter = false;
    }
    if (colder && hotter)
        return SumOrder::Equal;
    if (colder)
        return SumOrder::Colder;
    if (hotter)
        return SumOrder::Hotter;
    return SumOrder::Incomparable;
}

RMat t_transform(double t, int i, int j, int d) {
    if (i == j || i < 0 || j < 0 || i >= d || j >= d)
        throw UnsupportedError("t_transform indices out of range or equal");
    if (t < 0.0 || t > 1.0)
        throw UnsupportedError("t_transform parameter outside [0,1]");
    RMat m = RMat::Identity(d, d);
    m(i, i) = 1.0 - t;
    m(j, j) = 1.0 - t;
    m(i, j) = t;
    m(j, i) = t;
    return m;
}

namespace {

// First prefix (in sorted order) where sum_x exceeds sum_y, or -1 if none.
int first_violated_prefix(const Vec& x, const Vec& y) {
    const Vec xs = passive_sort(x);
    const Vec ys = passive_sort(y);
    double px = 0.0, py = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        px += xs(i);
        py += ys(i);
        if (px > py + kMajorizationTol)
            return static_cast<int>(i);
    }
    return -1;
}

} // namespace

HornTransfer horn_transfer(const Vec& x, const Vec& y) {
    const MajorizationResult pre = majorizes(y, x);
    if (!pre) {
        int prefix = pre.sum_mismatch ? static_cast<int>(x.size()) - 1 : first_violated_prefix(x, y);
        throw MajorizationError(prefix < 0 ? 0 : prefix);
    }
    const int d = static_cast<int>(x.size());
    HornTransfer out;
    out.matrix = RMat::Identity(d, d);

    // Relabel so the target is sorted descending; chain index pairs are
    // mapped back through sigma when emitted.
    const std::vector<int> sigma = descending_order(x);
    Vec xs(d), z(d);
    for (int p = 0; p < d; ++p) {
        xs(p) = x(sigma[p]);
        z(p) = y(sigma[p]);
    }

    auto emit = [&](double t, int a, int b) {
        const int i = sigma[a];
        const int j = sigma[b];
        out.chain.push_back({t, i, j});
        out.matrix = t_transform(t, i, j, d) * out.matrix;
    };

    // The chain below keeps every prefix sum of z - xs nonnegative. That is
    // automatic when z is sorted descending (it is then plain majorization);
    // when the relabeled source is out of order, pre-sort it with full-swap
    // T-transforms first.
    {
        bool dominated = true;
        double s = 0.0;
        for (int p = 0; p + 1 < d && dominated; ++p) {
            s += z(p) - xs(p);
            if (s < -kChainTol)
                dominated = false;
        }
        if (!dominated) {
            for (int p = 0; p + 1 < d; ++p) {
                int q = p;
                for (int i = p + 1; i < d; ++i)
                    if (z(i) > z(q))
                        q = i;
                if (q != p) {
                    std::swap(z(p), z(q));
                    emit(1.0, p, q);
                }
            }
        }
    }

    // First-difference chain: j is the leftmost unsettled coordinate (always
    // a surplus under prefix dominance), k the first deficit after it; the
    // transfer settles one of them without crossing its target.
    for (int round = 0; round < d; ++round) {
        int j = -1;
        for (int p = 0; p < d; ++p) {
            if (std::abs(z(p) - xs(p)) > kChainTol) {
                j = p;
                break;
            }
        }
        if (j < 0)
            break;
        if (z(j) < xs(j))
            throw InternalError("horn_transfer: prefix dominance lost");
        int k = -1;
        for (int p = j + 1; p < d; ++p) {
            if (xs(p) - z(p) > kChainTol) {
                k = p;
                break;
            }
        }
        if (k < 0)
            throw InternalError("horn_transfer: no deficit to serve");
        const double surplus = z(j) - xs(j);
        const double deficit = xs(k) - z(k);
        const double delta = std::min(surplus, deficit);
        const double t = std::min(delta / (z(j) - z(k)), 1.0);
        emit(t, j, k);
        if (surplus <= deficit) {
            z(k) += delta;
            z(j) = xs(j);
        } else {
            z(j) -= delta;
            z(k) = xs(k);
        }
    }
    if ((out.matrix * y - x).cwiseAbs().maxCoeff() > 1e-10)
        throw InternalError("horn_transfer chain failed to reach the target");
    return out;
}

RMat horn_unitary(const HornTransfer& transfer, int d) {
    RMat u = RMat::Identity(d, d);
    for (const TTransformStep& s : transfer.chain) {
        const double c = std::sqrt(1.0 - s.t);
        const double sn = std::sqrt(s.t);
        RMat r = RMat::Identity(d, d);
        r(s.i, s.i) = c;
        r(s.j, s.j) = c;
        r(s.i, s.j) = sn;
        r(s.j, s.i) = -sn;
        u = r * u;
    }
    return u;
}

RMat permutation_matrix(const std::vector<int>& perm) {
    const int d = static_cast<int>(perm.size());
    RMat p = RMat::Zero(d, d);
    for (int i = 0; i < d; ++i)
        p(i, perm[i]) = 1.0;
    return p;
}

namespace {

// Max-weight perfect matching via the Hungarian algorithm on -weights.
// Entries below the support threshold get a prohibitive cost. Returns the
// column assigned to each row, or an empty vector when only prohibited
// edges would complete the matching.
std::vector<int> max_weight_matching(const RMat& w, double support_tol) {
    const int n = static_cast<int>(w.rows());
    const double big = 1e6;
    auto cost = [&](int i, int j) { return w(i, j) > support_tol ? -w(i, j) : big; };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        row_to_col[p[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i)
        if (!(w(i, row_to_col[i]) > support_tol))
            return {};
    return row_to_col;
}

} // namespace

std::vector<BirkhoffTerm> birkhoff_decompose(const RMat& m) {
    validate_doubly_stochastic(m);
    const int d = static_cast<int>(m.rows());
    RMat residual = m;
    std::vector<BirkhoffTerm> terms;
    const int max_terms = (d - 1) * (d - 1) + 1;
    double assigned = 0.0;
    for (int it = 0; it < max_terms && assigned < 1.0 - 1e-12; ++it) {
        std::vector<int> match = max_weight_matching(residual, 1e-12);
        if (match.empty())
            break;
        double w = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i)
            w = std::min(w, residual(i, match[i]));
        if (!(w > 0))
            break;
        w = std::min(w, 1.0 - assigned);
        for (int i = 0; i < d; ++i)
            residual(i, match[i]) -= w;
        terms.push_back({w, std::move(match)});
        assigned += w;
    }
    if (terms.empty())
        throw InternalError("birkhoff_decompose found no permutation on the support");
    return terms;
}

} // namespace qtherm
