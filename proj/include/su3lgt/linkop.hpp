#pragma once

#include <Eigen/Sparse>

#include "su3lgt/cg.hpp"
#include "su3lgt/types.hpp"

namespace su3lgt {

// One electric-basis link state |R, a, b>: a indexes the tail (left) side,
// b the head (right) side; both run over the canonical states of R. Under a
// gauge transformation the tail index transforms in the dual of R and the head
// index in R itself.
struct LinkState {
    Irrep irrep;
    int left = 0;
    int right = 0;
    auto operator<=>(const LinkState&) const = default;
};

struct LinkOpElement {
    int alpha = 0, beta = 0;
    LinkState in, out;
    double amplitude = 0.0;  // sqrt(dim R / dim R') * C(Ra;3a|R'a') * C(Rb;3b|R'b')
};

// Ordered single-link full basis at truncation lam: irreps in (p,q)
// lexicographic order, then (left, right) row-major.
struct LinkBasis {
    explicit LinkBasis(int lam);
    int lam = 0;
    std::vector<LinkState> states;
    long index(const LinkState& s) const;
    long size() const { return static_cast<long>(states.size()); }

  private:
    std::map<Irrep, long> offsets_;
};

// All irreps with p,q <= lam, (p,q) lexicographic. Index p*(lam+1)+q.
std::vector<Irrep> truncated_irreps(int lam);

// U^3_{alpha,beta} acting on a single link state; outputs truncated to the
// irreps with p,q <= lam.
std::vector<LinkOpElement> apply_link_op(CGEngine& cg, int alpha, int beta,
                                         const LinkState& state, int lam);

// Sparse matrix of U^3_{alpha,beta} on the truncated single-link full basis.
Eigen::SparseMatrix<double> link_op_matrix(CGEngine& cg, int alpha, int beta, int lam);

// The two-link contracted operator of a through-vertex pair:
// (1/dim R) sum_{beta,s} U_{alpha,beta}|R,l1,s> (x) U_{beta,gamma}|R,s,r2>.
// Returns every output product component. The interference of the internal
// CG sum ties the two output irreps and the shared index together, leaving
// amplitudes (1/dim R') C(R l1;3 alpha|R' l1') C(R r2;3 gamma|R' r2').
struct TwoLinkTerm {
    LinkState first, second;
    double amplitude = 0.0;
};
std::vector<TwoLinkTerm> contracted_two_link(CGEngine& cg, Irrep r, int l1, int r2, int alpha,
                                             int gamma, int lam);

}  // namespace su3lgt
