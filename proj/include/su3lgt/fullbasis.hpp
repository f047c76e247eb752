#pragma once

#include <unordered_map>

#include "su3lgt/basis.hpp"

namespace su3lgt {

// Sparse vector over the full multiplet basis of the lattice. Keys pack the
// per-link LinkBasis indices with link 0 most significant.
using SparseVec = std::unordered_map<uint64_t, double>;

class FullBasisIndexer {
  public:
    FullBasisIndexer(const LatticeGeometry& g, int lam);
    uint64_t pack(const std::vector<long>& per_link) const;
    std::vector<long> unpack(uint64_t key) const;
    const LinkBasis& link_basis() const { return lb_; }
    int nlinks() const { return nlinks_; }
    // total dimension as double (can exceed 2^63 meaningfully only in reports)
    double total_dimension() const;

  private:
    LinkBasis lb_;
    int nlinks_ = 0;
    std::vector<uint64_t> strides_;
};

double dot(const SparseVec& a, const SparseVec& b);
double norm(const SparseVec& a);

// Gauge-invariant full-basis state for (pattern, per-vertex multiplicity
// labels): product of the vertex singlet tensors. Orthonormal across states.
SparseVec gi_full_state(const LatticeGeometry& g, const FullBasisIndexer& ix,
                        SingletBasisCache& sb, const Pattern& p, const std::vector<int>& mults);

// Apply the literal Eq.-(2) plaquette operator (sum over fundamental indices
// of four link-operator factors, adjoints on reversed links) to a sparse
// state. nnz_cap guards runaway growth.
SparseVec apply_plaquette(const LatticeGeometry& g, const FullBasisIndexer& ix, CGEngine& cg,
                          int plaquette, const SparseVec& v, long nnz_cap = 20000000);

// <bra_i| Box |ket_j> for lists of sparse states.
Eigen::MatrixXd plaquette_matrix(const LatticeGeometry& g, const FullBasisIndexer& ix, CGEngine& cg,
                                 int plaquette, const std::vector<SparseVec>& bras,
                                 const std::vector<SparseVec>& kets);

// Orthogonal projector onto the gauge-invariant subspace, applied through the
// explicit GI basis.
class GaugeProjector {
  public:
    GaugeProjector(const LatticeGeometry& g, int lam, SingletBasisCache& sb);
    long rank() const { return static_cast<long>(states_.size()); }
    SparseVec apply(const SparseVec& v) const;
    const std::vector<SparseVec>& basis() const { return states_; }
    const PhysicalBasis& physical() const { return phys_; }
    const FullBasisIndexer& indexer() const { return ix_; }

  private:
    FullBasisIndexer ix_;
    PhysicalBasis phys_;
    std::vector<SparseVec> states_;
};

// Tensor-network evaluation of <(Pout,mults')| Box_pi |(Pin,mults)>, literal in
// the link-operator blocks but contracted vertex-by-vertex so that large
// patterns stay cheap. Returns the (prod mult_out) x (prod mult_in) block, or
// an empty matrix when a selection rule kills the whole block.
Eigen::MatrixXd tn_plaquette_block(const LatticeGeometry& g, int lam, CGEngine& cg,
                                   SingletBasisCache& sb, int plaquette, const Pattern& pout,
                                   const Pattern& pin);

// Box + box† of one plaquette on the whole physical basis, evaluated through
// the tensor-network route (the full-basis oracle for larger geometries).
Eigen::MatrixXd tn_plaquette_matrix_physical(const LatticeGeometry& g, int lam, CGEngine& cg,
                                             SingletBasisCache& sb, const PhysicalBasis& phys,
                                             int plaquette);

}  // namespace su3lgt
