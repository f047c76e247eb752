#include "su3lgt/rep.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <Eigen/SVD>

namespace su3lgt {

std::string to_string(Irrep r) {
    return "(" + std::to_string(r.p) + "," + std::to_string(r.q) + ")";
}

namespace {

// Gelfand-Tsetlin pattern for gl(3): top row (m13,m23,m33) = (p+q, q, 0),
// middle row (m12,m22), bottom m11, with betweenness.
struct GtPattern {
    int m13, m23, m33, m12, m22, m11;
    auto operator<=>(const GtPattern&) const = default;
};

std::vector<GtPattern> gt_patterns(Irrep r) {
    const int m13 = r.p + r.q, m23 = r.q, m33 = 0;
    std::vector<GtPattern> out;
    for (int m12 = m23; m12 <= m13; ++m12)
        for (int m22 = m33; m22 <= m23; ++m22)
            for (int m11 = m22; m11 <= m12; ++m11)
                out.push_back({m13, m23, m33, m12, m22, m11});
    return out;
}

// (2T, 2Tz, 3Y)
std::array<int, 3> gt_weight(const GtPattern& m) {
    return {m.m12 - m.m22, 2 * m.m11 - (m.m12 + m.m22),
            3 * (m.m12 + m.m22) - 2 * (m.m13 + m.m23 + m.m33)};
}

// canonical order: Y desc, T desc, Tz desc
std::array<int, 3> sort_key(const std::array<int, 3>& w) {
    return {-w[2], -w[0], -w[1]};
}

RepMatrices build_gt_matrices(Irrep r) {
    auto pats = gt_patterns(r);
    const int d = static_cast<int>(pats.size());
    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sort_key(gt_weight(pats[a])) < sort_key(gt_weight(pats[b]));
    });
    std::map<GtPattern, int> pos;
    for (int i = 0; i < d; ++i) pos[pats[order[i]]] = i;

    RepMatrices g;
    g.e12 = Eigen::MatrixXd::Zero(d, d);
    g.e23 = Eigen::MatrixXd::Zero(d, d);
    g.h1 = Eigen::MatrixXd::Zero(d, d);
    g.h2 = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : pats) {
        const int j = pos.at(m);
        const int e11 = m.m11;
        const int e22 = m.m12 + m.m22 - m.m11;
        const int e33 = (m.m13 + m.m23 + m.m33) - (m.m12 + m.m22);
        g.h1(j, j) = e11 - e22;
        g.h2(j, j) = e22 - e33;
        // E12 raises m11
        {
            GtPattern n = m;
            n.m11 += 1;
            auto it = pos.find(n);
            if (it != pos.end()) {
                const double amp = double(m.m12 - m.m11) * double(m.m11 - m.m22 + 1);
                if (amp > 0) g.e12(it->second, j) = std::sqrt(amp);
            }
        }
        // E23 raises m12 (k=1) or m22 (k=2); Gelfand-Tsetlin matrix elements
        const int row2[2] = {m.m12, m.m22};
        const int row3[3] = {m.m13, m.m23, m.m33};
        for (int k = 1; k <= 2; ++k) {
            GtPattern n = m;
            (k == 1 ? n.m12 : n.m22) += 1;
            if (n.m12 > n.m13 || n.m22 > n.m23 || n.m11 > n.m12 || n.m22 > n.m12) continue;
            auto it = pos.find(n);
            if (it == pos.end()) continue;
            const int mk = row2[k - 1];
            double top = 1.0;
            for (int jj = 1; jj <= 3; ++jj) top *= row3[jj - 1] - mk + k - jj;
            top *= m.m11 - mk + k - 2;
            double den = 1.0;
            for (int jj = 1; jj <= 2; ++jj)
                if (jj != k) den *= double(row2[jj - 1] - mk + k - jj) *
                                    double(row2[jj - 1] - mk + k - jj - 1);
            const double rad = -top / den;
            if (rad > 1e-14) g.e23(it->second, j) = std::sqrt(rad);
        }
    }
    g.e21 = g.e12.transpose();
    g.e32 = g.e23.transpose();
    return g;
}

std::recursive_mutex g_rep_mutex;

}  // namespace

Eigen::MatrixXd RepMatrices::casimir() const {
    const Eigen::MatrixXd E13 = e13(), E31 = e31();
    const Eigen::MatrixXd t3 = h1 / 2.0;
    const Eigen::MatrixXd t8 = (h1 + 2.0 * h2) / (2.0 * std::sqrt(3.0));
    return 0.5 * (e12 * e21 + e21 * e12 + E13 * E31 + E31 * E13 + e23 * e32 + e32 * e23) +
           t3 * t3 + t8 * t8;
}

const RepMatrices& rep_matrices(Irrep r) {
    static std::map<Irrep, RepMatrices> cache;
    std::scoped_lock lk(g_rep_mutex);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    RepMatrices g;
    if (r.p >= r.q) {
        g = build_gt_matrices(r);
    } else {
        const RepMatrices& gc = rep_matrices(conjugate(r));
        g.e12 = -gc.e12.transpose();
        g.e21 = -gc.e21.transpose();
        g.e23 = -gc.e23.transpose();
        g.e32 = -gc.e32.transpose();
        g.h1 = -gc.h1.transpose();
        g.h2 = -gc.h2.transpose();
    }
    return cache.emplace(r, std::move(g)).first->second;
}

std::vector<WeightState> enumerate_states(Irrep r) {
    std::vector<WeightState> out;
    if (r.p >= r.q) {
        auto pats = gt_patterns(r);
        std::vector<std::array<int, 3>> ws;
        ws.reserve(pats.size());
        for (const auto& m : pats) ws.push_back(gt_weight(m));
        std::sort(ws.begin(), ws.end(),
                  [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
        for (const auto& w : ws) out.push_back({r, w[0], w[1], w[2], 0});
    } else {
        for (const auto& s : enumerate_states(conjugate(r)))
            out.push_back({r, s.twice_t, -s.twice_tz, -s.y_times3, 0});
    }
    return out;
}

TensorDecomposition tensor_decompose(Irrep r1, Irrep r2) {
    // Littlewood-Richardson on 3-row Young diagrams. lambda = (p1+q1, q1, 0);
    // mu supplies mu1 boxes of label 1 then mu2 of label 2, each added as a
    // horizontal strip, with the lattice-word condition. Columns of height 3
    // are stripped at the end.
    const long l1 = r1.p + r1.q, l2 = r1.q;
    const long mu1 = r2.p + r2.q, mu2 = r2.q;
    std::map<Irrep, int> terms;
    const long lam[3] = {l1, l2, 0};
    for (long x1 = 0; x1 <= mu1; ++x1)
        for (long x2 = 0; x2 <= mu1 - x1; ++x2) {
            const long x3 = mu1 - x1 - x2;
            long kappa[3] = {lam[0] + x1, lam[1] + x2, lam[2] + x3};
            // horizontal strip: kappa1 >= lam1 >= kappa2 >= lam2 >= kappa3 >= lam3
            if (!(kappa[0] >= lam[0] && lam[0] >= kappa[1] && kappa[1] >= lam[1] &&
                  lam[1] >= kappa[2] && kappa[2] >= lam[2]))
                continue;
            // label 2: y1 = 0 (a 2 at a row-1 end would lead the reading word)
            for (long y2 = 0; y2 <= mu2; ++y2) {
                const long y3 = mu2 - y2;
                long nu[3] = {kappa[0], kappa[1] + y2, kappa[2] + y3};
                if (!(nu[0] >= kappa[0] && kappa[0] >= nu[1] && nu[1] >= kappa[1] &&
                      kappa[1] >= nu[2] && nu[2] >= kappa[2]))
                    continue;
                // lattice word: #2 through row k <= #1 through row k-1
                if (y2 > x1) continue;
                if (y2 + y3 > x1 + x2) continue;
                Irrep out{static_cast<int>(nu[0] - nu[1]), static_cast<int>(nu[1] - nu[2])};
                terms[out] += 1;
            }
        }
    TensorDecomposition d;
    d.r1 = r1;
    d.r2 = r2;
    d.terms.assign(terms.begin(), terms.end());
    return d;
}

const Eigen::MatrixXd& conjugation_intertwiner(Irrep r) {
    static std::map<Irrep, Eigen::MatrixXd> cache;
    std::scoped_lock lk(g_rep_mutex);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    const long d = dimension(r);
    Eigen::MatrixXd phi;
    if (r.p != r.q) {
        phi = Eigen::MatrixXd::Identity(d, d);
    } else {
        const RepMatrices& g = rep_matrices(r);
        const RepMatrices& gc = rep_matrices(conjugate(r));
        const Eigen::MatrixXd mats_c[6] = {gc.e12, gc.e21, gc.e23, gc.e32, gc.h1, gc.h2};
        const Eigen::MatrixXd mats[6] = {g.e12, g.e21, g.e23, g.e32, g.h1, g.h2};
        // Row-major vec: vec(Phi A - B Phi) = (I kron A^T - B kron I) vec(Phi), B = -G^T
        Eigen::MatrixXd M(6 * d * d, d * d);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
        auto kron = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
            Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
            for (int i = 0; i < a.rows(); ++i)
                for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            return k;
        };
        for (int k = 0; k < 6; ++k) {
            const Eigen::MatrixXd b = -mats[k].transpose();
            M.block(k * d * d, 0, d * d, d * d) =
                kron(id, mats_c[k].transpose()) - kron(b, id);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) > 1e-8 * s(0))
            throw std::runtime_error("conjugation intertwiner: no null space for " + to_string(r));
        Eigen::VectorXd v = svd.matrixV().col(d * d - 1);
        phi = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            v.data(), d, d);
        // irreducibility gives phi phi^T = c I; normalize to orthogonal
        phi /= std::sqrt((phi * phi.transpose())(0, 0));
        for (long i = 0; i < d * d; ++i) {
            const double x = phi(i / d, i % d);
            if (std::abs(x) > 1e-8) {
                if (x < 0) phi = -phi;
                break;
            }
        }
        // sanity: orthogonality and the intertwiner property
        if ((phi * phi.transpose() - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
            throw std::runtime_error("conjugation intertwiner not orthogonal for " + to_string(r));
        for (int k = 0; k < 6; ++k) {
            const Eigen::MatrixXd resid = phi * mats_c[k] - (-mats[k].transpose()) * phi;
            if (resid.cwiseAbs().maxCoeff() > 1e-8)
                throw std::runtime_error("conjugation intertwiner residual for " + to_string(r));
        }
    }
    return cache.emplace(r, std::move(phi)).first->second;
}

}  // namespace su3lgt
