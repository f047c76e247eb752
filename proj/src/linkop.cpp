#include "su3lgt/linkop.hpp"

#include <stdexcept>

namespace su3lgt {

std::vector<Irrep> truncated_irreps(int lam) {
    std::vector<Irrep> out;
    for (int p = 0; p <= lam; ++p)
        for (int q = 0; q <= lam; ++q) out.push_back({p, q});
    return out;
}

LinkBasis::LinkBasis(int lam_) : lam(lam_) {
    long at = 0;
    for (const Irrep r : truncated_irreps(lam)) {
        offsets_[r] = at;
        const long d = dimension(r);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) states.push_back({r, a, b});
        at += d * d;
    }
}

long LinkBasis::index(const LinkState& s) const {
    auto it = offsets_.find(s.irrep);
    if (it == offsets_.end()) throw std::out_of_range("link state irrep outside truncation");
    const long d = dimension(s.irrep);
    if (s.left < 0 || s.left >= d || s.right < 0 || s.right >= d)
        throw std::out_of_range("link state index out of range");
    return it->second + s.left * d + s.right;
}

std::vector<LinkOpElement> apply_link_op(CGEngine& cg, int alpha, int beta,
                                         const LinkState& state, int lam) {
    const Irrep r3{1, 0};
    std::vector<LinkOpElement> out;
    const Irrep r = state.irrep;
    if (r.p > lam || r.q > lam) throw std::out_of_range("input irrep outside truncation");
    const CGTable& t = cg.table(r, r3);
    const long d = dimension(r);
    for (const auto& b : t.blocks()) {
        const Irrep rp = b.rout;
        if (rp.p > lam || rp.q > lam) continue;  // sharp truncation
        const long dp = dimension(rp);
        const double pref = std::sqrt(double(d) / double(dp));
        for (int ap = 0; ap < dp; ++ap) {
            const double ca = b.coeff(state.left * 3 + alpha, ap);
            if (ca == 0.0) continue;
            for (int bp = 0; bp < dp; ++bp) {
                const double cb = b.coeff(state.right * 3 + beta, bp);
                if (cb == 0.0) continue;
                out.push_back({alpha, beta, state, LinkState{rp, ap, bp}, pref * ca * cb});
            }
        }
    }
    return out;
}

Eigen::SparseMatrix<double> link_op_matrix(CGEngine& cg, int alpha, int beta, int lam) {
    const LinkBasis basis(lam);
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& s : basis.states)
        for (const auto& el : apply_link_op(cg, alpha, beta, s, lam))
            trips.emplace_back(basis.index(el.out), basis.index(el.in), el.amplitude);
    Eigen::SparseMatrix<double> m(basis.size(), basis.size());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

std::vector<TwoLinkTerm> contracted_two_link(CGEngine& cg, Irrep r, int l1, int r2, int alpha,
                                             int gamma, int lam) {
    const long d = dimension(r);
    std::map<std::pair<LinkState, LinkState>, double> acc;
    for (int beta = 0; beta < 3; ++beta)
        for (int s = 0; s < static_cast<int>(d); ++s) {
            const auto left = apply_link_op(cg, alpha, beta, {r, l1, s}, lam);
            const auto right = apply_link_op(cg, beta, gamma, {r, s, r2}, lam);
            for (const auto& e1 : left)
                for (const auto& e2 : right)
                    acc[{e1.out, e2.out}] += e1.amplitude * e2.amplitude / double(d);
        }
    std::vector<TwoLinkTerm> out;
    for (const auto& [k, v] : acc)
        if (std::abs(v) > 1e-14) out.push_back({k.first, k.second, v});
    return out;
}

}  // namespace su3lgt
