#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "su3lgt/rep.hpp"
#include "su3lgt/types.hpp"

namespace su3lgt {

struct CGKey {
    Irrep r1, r2, rout;
    int a = 0, b = 0, c = 0;
    int gamma = 0;
};

// All coupling coefficients for one product r1 (x) r2.
//
// Construction: for each output irrep the highest-weight vectors are the null
// space of the product raising operators restricted to the matching weight
// subspace; outer multiplicities are orthonormalized by projecting product
// basis vectors in lexicographic order; the rest of each block is generated by
// lowering. Sign per (rout, gamma) block: the entry with lexicographically
// smallest (a, b, c) among nonzero entries is positive.
class CGTable {
  public:
    struct Block {
        Irrep rout;
        int gamma = 0;
        Eigen::MatrixXd coeff;  // (dim r1 * dim r2) x dim rout, row index a*d2+b
    };

    Irrep r1() const { return r1_; }
    Irrep r2() const { return r2_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block* block(Irrep rout, int gamma) const;
    int multiplicity(Irrep rout) const;

    double cg(Irrep rout, int a, int b, int c, int gamma = 0) const;

    // max |U^T U - I| over all coupled columns
    double orthogonality_residual() const;
    // max |U U^T - I| on the product space
    double completeness_residual() const;

    uint64_t checksum() const;

  private:
    friend class CGEngine;
    Irrep r1_, r2_;
    std::vector<Block> blocks_;
};

// Builds, caches and serializes CG tables under one fixed phase convention.
// `flip_signs` negates every block; gauge-invariant quantities must not care.
class CGEngine {
  public:
    struct Options {
        bool flip_signs = false;
        long product_dim_cap = 2048;
        std::filesystem::path cache_dir;  // empty: in-memory only
    };

    CGEngine() = default;
    explicit CGEngine(Options opt) : opt_(std::move(opt)) {}

    const std::string& convention_id() const;
    const Options& options() const { return opt_; }

    // Memoized; builds (or loads from cache_dir) on first use.
    const CGTable& table(Irrep r1, Irrep r2);

    double cg(const CGKey& key);

    double verify_orthogonality(Irrep r1, Irrep r2);
    double verify_completeness(Irrep r1, Irrep r2);

    // N_{r1p,r2p} from the triple-CG contraction producing the 6-6-8 vertex
    // factor; r1p, r2p must be 3bar or 6. `residual`, when given, receives the
    // max deviation of the contraction from N times the 8 (x) r2p -> r1p table.
    double vertex_factor_668(Irrep r1p, Irrep r2p, double* residual = nullptr);

    static void save(const CGTable& t, const std::string& convention, const std::filesystem::path& file);
    static CGTable load(const std::filesystem::path& file, const std::string& expect_convention);

  private:
    CGTable build(Irrep r1, Irrep r2) const;
    Options opt_;
    std::map<std::pair<Irrep, Irrep>, std::unique_ptr<CGTable>> cache_;
};

// Best-effort exact form: if c^2 is a small-denominator rational, returns
// "sqrt(n/d)" or "-sqrt(n/d)"; empty otherwise.
std::string surd_string(double c);

uint64_t fnv1a64(const void* data, size_t n, uint64_t seed = 1469598103934665603ULL);
uint64_t fnv1a64(const std::string& s, uint64_t seed = 1469598103934665603ULL);

}  // namespace su3lgt
