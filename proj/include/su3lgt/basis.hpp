#pragma once

#include <cstdint>
#include <map>

#include <Eigen/Dense>

#include "su3lgt/cg.hpp"
#include "su3lgt/lattice.hpp"
#include "su3lgt/linkop.hpp"
#include "su3lgt/types.hpp"

namespace su3lgt {

using Pattern = std::vector<Irrep>;  // one irrep per link

// Flat index over all irrep assignments with p,q <= lam. Per link the irrep
// index is p*(lam+1)+q (so the binary registers are the p and q bits); link 0
// is the most significant digit. Index 0 is the all-singlet assignment.
class PatternIndexer {
  public:
    PatternIndexer(int nlinks, int lam);
    uint64_t index(const Pattern& p) const;
    Pattern pattern(uint64_t idx) const;
    uint64_t size() const { return size_; }
    int nlinks() const { return nlinks_; }
    int lam() const { return lam_; }
    int bits_per_register() const;  // qubits per p (or q) register

    // flip one bit: reg = 0 for p, 1 for q; returns the new flat index
    uint64_t flip_bit(uint64_t idx, int link, int reg, int bit) const;

  private:
    int nlinks_, lam_;
    uint64_t size_;
};

// Sum of (p,q) over incoming links plus (q,p) over outgoing ones has
// mod3(p) == mod3(q), i.e. the vertex triality balance vanishes.
bool mod3_valid_at(const LatticeGeometry& g, const Pattern& p, int vertex);
bool mod3_valid(const LatticeGeometry& g, const Pattern& p);

// All assignments passing the mod-3 test at every vertex, in PatternIndexer
// order.
std::vector<Pattern> enumerate_reduced_basis(const LatticeGeometry& g, int lam);

struct ResourceReport {
    int lam = 0;
    int irrep_qubits = 0;       // 2 ceil(log2(1+lam))
    int local_qubits = 0;       // 2 sum_j ceil(log2(1+2j lam))
    int qubits_per_link = 0;
    std::array<int, 3> register_dims{};  // [T], [Tz], [Y] physical dimensions
    long links = 0;
    long total_qubits = 0;
};
ResourceReport qubit_count(int lam, long n_links = 1);

// Deterministic orthonormal singlet bases of vertex end products. Ends are
// given as (irrep, is_head); head ends couple in the canonical basis, tail
// ends in the dual one (mapped through the conjugation intertwiner). Basis
// rows are singlet vectors over the row-major product of end index spaces,
// ordered by the intermediate coupling path.
class SingletBasisCache {
  public:
    explicit SingletBasisCache(CGEngine& cg) : cg_(cg) {}
    using EndSpec = std::vector<std::pair<Irrep, bool>>;
    const Eigen::MatrixXd& basis(const EndSpec& ends);
    int multiplicity(const EndSpec& ends) { return static_cast<int>(basis(ends).rows()); }
    CGEngine& engine() { return cg_; }

  private:
    CGEngine& cg_;
    std::map<EndSpec, Eigen::MatrixXd> cache_;
};

SingletBasisCache::EndSpec vertex_end_spec(const LatticeGeometry& g, const Pattern& p, int vertex);

// Gauge-invariant basis resolved by per-vertex singlet multiplicity.
struct PhysicalBasis {
    struct State {
        Pattern pattern;
        std::vector<int> mults;  // one label per vertex
    };
    std::vector<State> states;
    std::vector<Pattern> patterns;                  // distinct patterns, enumeration order
    std::map<std::vector<int>, long> pattern_pos;   // irrep indices -> position in `patterns`
    long index(const Pattern& p, const std::vector<int>& mults) const;
    long size() const { return static_cast<long>(states.size()); }
    std::vector<std::vector<int>> mult_dims;        // per pattern, per vertex
    long first_state_of_pattern(long pattern_pos) const { return pattern_first_[pattern_pos]; }

    std::vector<long> pattern_first_;
};

PhysicalBasis enumerate_physical_basis(const LatticeGeometry& g, int lam, SingletBasisCache& sb);

}  // namespace su3lgt
