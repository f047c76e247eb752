#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "su3lgt/compiler.hpp"
#include "su3lgt/fullbasis.hpp"

namespace su3lgt {

using Cx = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;

struct CouplingParams {
    double g = 1.0;
    double a = 1.0;
    int d = 2;
    double electric_prefactor() const { return g * g / (2.0 * std::pow(a, d - 2)); }
    double magnetic_prefactor() const { return 1.0 / (2.0 * std::pow(a, 4 - d) * g * g); }
};

struct CompiledSet {
    std::vector<CompiledPlaquette> per_plaquette;
};
CompiledSet compile_all(const LatticeGeometry& g, int lam, SingletBasisCache& sb);

// Simulation space on the reduced side. `PatternSpace` spans bare irrep
// assignments (optionally only the mod-3-valid ones); the magnetic term is
// well defined on it only when every gauge-invariant pattern has multiplicity
// one at every vertex. `PhysicalSpace` spans (pattern, multiplicity) states
// and always works.
struct PatternSpace {
    LatticeGeometry geom;
    int lam = 0;
    std::vector<Pattern> patterns;
    std::unordered_map<uint64_t, long> pos;  // PatternIndexer flat -> basis position
    PatternIndexer indexer{1, 1};
    std::vector<char> mod3_ok;  // per basis state
    std::vector<char> gauge_ok; // nonzero singlet multiplicity at every vertex

    long size() const { return static_cast<long>(patterns.size()); }
};
PatternSpace make_pattern_space(const LatticeGeometry& g, int lam, SingletBasisCache& sb,
                                bool mod3_only);

// A two-level generator lifted to the simulation basis: the same angle applies
// to every (i, j) pair (disjoint planes, one per spectator configuration).
struct LiftedRotation {
    std::vector<std::pair<long, long>> pairs;
    double hcoeff = 0.0;  // Hamiltonian matrix element (sign included)
    int plaquette = 0;
};

// Precomputed Trotter data: diagonal electric energies plus the magnetic
// Givens rotations of every plaquette in a fixed checkerboard order.
struct TrotterPlan {
    Eigen::VectorXd electric;  // bare sum of link Casimirs per basis state
    std::vector<LiftedRotation> rotations;
    CouplingParams params;
    long dim = 0;

    Eigen::MatrixXd dense_hamiltonian() const;
    Eigen::SparseMatrix<double> sparse_hamiltonian() const;
};

TrotterPlan make_trotter_plan(const PatternSpace& space, const CompiledSet& ops,
                              const CouplingParams& params);
TrotterPlan make_trotter_plan_physical(const LatticeGeometry& g, int lam,
                                       const PhysicalBasis& phys, const CompiledSet& ops,
                                       const CouplingParams& params);

// one Trotter step; order 1: E then all rotations; order 2: symmetric with a
// palindromic rotation sweep
void trotter_step(const TrotterPlan& plan, VectorXcd& psi, double dt, int order);

// exp(-i H t) psi0 by dense eigendecomposition (dim <= dense_limit) or a
// Lanczos propagator with step-size control.
VectorXcd evolve_exact(const Eigen::SparseMatrix<double>& h, const VectorXcd& psi0, double t,
                       long dense_limit = 4096);
VectorXcd evolve_exact_dense(const Eigen::MatrixXd& h, const VectorXcd& psi0, double t);
VectorXcd evolve_krylov(const Eigen::SparseMatrix<double>& h, const VectorXcd& psi0, double t,
                        int subspace_dim = 30, double step_tol = 1e-12);

struct ObservableRecord {
    double time = 0.0;
    double norm = 0.0;
    double electric = 0.0;        // <sum_links C2> (bare, no prefactor)
    double magnetic = 0.0;        // <sum_plaq box+box†>
    double energy = 0.0;          // full Hamiltonian expectation
    double mod3_violation = 0.0;  // population outside the mod-3-valid span
    double gauge_violation = 0.0; // population outside the gauge-invariant span
    std::vector<double> plaquette_expectation;
    std::vector<std::vector<double>> link_irrep_probs;  // per link, per irrep index
};

ObservableRecord measure_observables(const PatternSpace& space, const TrotterPlan& plan,
                                     const VectorXcd& psi, double time);

struct EvolutionTrace {
    std::vector<ObservableRecord> records;
    void write_csv(const std::filesystem::path& file) const;
};

EvolutionTrace evolve_trotter(const PatternSpace& space, const TrotterPlan& plan,
                              const VectorXcd& psi0, double t, int n_steps, int order);

// least-squares slope of log(y) vs log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace su3lgt
