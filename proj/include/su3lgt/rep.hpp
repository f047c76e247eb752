#pragma once

#include <Eigen/Dense>

#include "su3lgt/types.hpp"

namespace su3lgt {

// Canonical weight-state enumeration.
//
// For p >= q the basis is the Gelfand-Tsetlin one, ordered by
// (Y descending, T descending, Tz descending). For p < q, state i is the
// conjugation partner of state i of (q,p): same T, negated (Tz, Y), with
// generator matrices -G^T. This pairing makes <R,i; Rbar,j | 1> proportional
// to delta_ij, matching the usual convention for conjugate triplets.
std::vector<WeightState> enumerate_states(Irrep r);

// Complete Littlewood-Richardson decomposition of r1 (x) r2, with outer
// multiplicities. Terms sorted by (p, q).
TensorDecomposition tensor_decompose(Irrep r1, Irrep r2);

// Representation matrices of the complexified algebra in the canonical basis.
// E12/E21 are the isospin ladder, E23/E32 the second simple root,
// H1 = E11-E22 = 2Tz and H2 = E22-E33. All real.
struct RepMatrices {
    Eigen::MatrixXd e12, e21, e23, e32, h1, h2;

    Eigen::MatrixXd e13() const { return e12 * e23 - e23 * e12; }
    Eigen::MatrixXd e31() const { return e32 * e21 - e21 * e32; }
    // Sum of squares of the eight Hermitian su(3) generators.
    Eigen::MatrixXd casimir() const;
};

const RepMatrices& rep_matrices(Irrep r);

// Orthogonal intertwiner Phi with Phi * G(conj r) = (-G(r)^T) * Phi for every
// generator G. Identity whenever p != q; for self-conjugate irreps it maps the
// dual basis of r onto the canonical basis of conj(r) = r. Sign fixed by the
// first nonzero entry in row-major order being positive.
const Eigen::MatrixXd& conjugation_intertwiner(Irrep r);

}  // namespace su3lgt
