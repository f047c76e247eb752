#include <doctest.h>

#include <random>

#include <Eigen/SVD>

#include "su3lgt/fullbasis.hpp"

using namespace su3lgt;

namespace {
const Irrep R1{0, 0}, R3{1, 0}, R3B{0, 1}, R8{1, 1};

// brute-force singlet count at one vertex: joint null space of all eight
// Gauss generators (complexified basis) acting on the incident end spaces
int vertex_nullspace_dim(const LatticeGeometry& g, const Pattern& p, int v) {
    const auto& ends = g.vertex_ends[v];
    std::vector<long> dims;
    for (const auto& e : ends) dims.push_back(dimension(p[e.link]));
    long D = 1;
    for (long d : dims) D *= d;
    std::vector<Eigen::MatrixXd> gens;
    for (int which = 0; which < 8; ++which) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(D, D);
        for (size_t k = 0; k < ends.size(); ++k) {
            const auto& rm = rep_matrices(p[ends[k].link]);
            Eigen::MatrixXd x;
            switch (which) {
                case 0: x = rm.e12; break;
                case 1: x = rm.e21; break;
                case 2: x = rm.e23; break;
                case 3: x = rm.e32; break;
                case 4: x = rm.e13(); break;
                case 5: x = rm.e31(); break;
                case 6: x = rm.h1; break;
                default: x = rm.h2; break;
            }
            if (!ends[k].is_head) x = (-x.transpose()).eval();
            Eigen::MatrixXd lifted = Eigen::MatrixXd::Identity(1, 1);
            for (size_t s = 0; s < dims.size(); ++s) {
                const Eigen::MatrixXd& f =
                    s == k ? x : Eigen::MatrixXd::Identity(dims[s], dims[s]).eval();
                Eigen::MatrixXd next(lifted.rows() * f.rows(), lifted.cols() * f.cols());
                for (long i = 0; i < lifted.rows(); ++i)
                    for (long j = 0; j < lifted.cols(); ++j)
                        next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) =
                            lifted(i, j) * f;
                lifted = std::move(next);
            }
            m += lifted;
        }
        gens.push_back(std::move(m));
    }
    Eigen::MatrixXd stack(8 * D, D);
    for (int k = 0; k < 8; ++k) stack.middleRows(k * D, D) = gens[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (long i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9 * std::max(1.0, s(0))) ++rank;
    return static_cast<int>(D - rank);
}
}  // namespace

TEST_CASE("pattern indexer") {
    const PatternIndexer ix(4, 1);
    CHECK(ix.size() == 256);
    CHECK(ix.index(Pattern(4, R1)) == 0);  // all-singlet first
    SUBCASE("round trips") {
        for (uint64_t k : {uint64_t(0), uint64_t(17), uint64_t(255)})
            CHECK(ix.index(ix.pattern(k)) == k);
    }
    SUBCASE("lexicographic monotonicity in the documented key") {
        uint64_t prev = ix.index(ix.pattern(0));
        for (uint64_t k = 1; k < ix.size(); ++k) {
            const uint64_t cur = ix.index(ix.pattern(k));
            CHECK(cur > prev);
            prev = cur;
        }
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS((void)ix.pattern(256), std::out_of_range);
        CHECK_THROWS_AS((void)ix.index(Pattern(4, Irrep{2, 0})), std::out_of_range);
    }
    SUBCASE("register bit flips") {
        const uint64_t vac = 0;
        const uint64_t f = ix.flip_bit(vac, 2, 0, 0);  // p bit of link 2
        CHECK(ix.pattern(f)[2] == R3);
        CHECK(ix.flip_bit(f, 2, 0, 0) == vac);
    }
}

TEST_CASE("mod-3 vertex rule") {
    SUBCASE("single outgoing 3 is excluded") {
        const auto g = LatticeGeometry::custom(2, {{0, 1}});
        CHECK_FALSE(mod3_valid_at(g, {R3}, 0));  // contributes (q,p) = (0,1)
        CHECK_FALSE(mod3_valid_at(g, {R3}, 1));
        CHECK(mod3_valid_at(g, {R1}, 0));
        CHECK(mod3_valid_at(g, {R8}, 0));  // (1,1): mod3 equal
    }
    SUBCASE("incoming 3 with outgoing 3 balances") {
        const auto g = LatticeGeometry::custom(3, {{0, 1}, {1, 2}});
        CHECK(mod3_valid_at(g, {R3, R3}, 1));       // (1,0) + (0,1) = (1,1)
        CHECK_FALSE(mod3_valid_at(g, {R3, R3B}, 1));
    }
}

TEST_CASE("reduced basis on the single plaquette") {
    const auto g = LatticeGeometry::string_chain(1);
    const auto basis = enumerate_reduced_basis(g, 1);
    // oracle: exhaustive 4^4 scan
    const PatternIndexer ix(4, 1);
    long count = 0;
    for (uint64_t k = 0; k < ix.size(); ++k)
        if (mod3_valid(g, ix.pattern(k))) ++count;
    CHECK(static_cast<long>(basis.size()) == count);
    CHECK(basis.size() == 18);
    // deterministic order
    uint64_t prev = 0;
    for (size_t k = 1; k < basis.size(); ++k) {
        const uint64_t cur = ix.index(basis[k]);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("qubit counts") {
    SUBCASE("lambda 1") {
        const auto r = qubit_count(1);
        CHECK(r.irrep_qubits == 2);
        CHECK(r.local_qubits == 16);
        CHECK(r.qubits_per_link == 18);
        CHECK(r.register_dims == std::array<int, 3>{3, 5, 7});
    }
    SUBCASE("lambda 2") { CHECK(qubit_count(2).qubits_per_link == 26); }
    SUBCASE("integer match for lambda 1..8") {
        for (int lam = 1; lam <= 8; ++lam) {
            const auto r = qubit_count(lam, 7);
            auto clog2 = [](long x) {
                int b = 0;
                while ((1L << b) < x) ++b;
                return b;
            };
            const int expect = 2 * clog2(1 + lam) + 2 * (clog2(1 + 2 * lam) +
                                                         clog2(1 + 4 * lam) + clog2(1 + 6 * lam));
            CHECK(r.qubits_per_link == expect);
            CHECK(r.total_qubits == 7L * expect);
            CHECK(r.register_dims == std::array<int, 3>{1 + 2 * lam, 1 + 4 * lam, 1 + 6 * lam});
        }
    }
    SUBCASE("lambda 0 rejected") { CHECK_THROWS(qubit_count(0)); }
}

TEST_CASE("vertex singlet bases match the generator null spaces") {
    CGEngine cg;
    SingletBasisCache sb(cg);
    const auto g = LatticeGeometry::string_chain(2);
    // every mod-3 pattern, every vertex: dimensions agree with brute force
    for (const Pattern& p : enumerate_reduced_basis(g, 1)) {
        for (int v = 0; v < g.num_vertices; ++v) {
            const auto spec = vertex_end_spec(g, p, v);
            const Eigen::MatrixXd& b = sb.basis(spec);
            CHECK(static_cast<int>(b.rows()) == vertex_nullspace_dim(g, p, v));
            if (b.rows())
                CHECK((b * b.transpose() - Eigen::MatrixXd::Identity(b.rows(), b.rows()))
                          .cwiseAbs()
                          .maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("physical basis of plaquette and string") {
    CGEngine cg;
    SingletBasisCache sb(cg);
    SUBCASE("single plaquette: 4 loop patterns, multiplicity free") {
        const auto g = LatticeGeometry::string_chain(1);
        const auto phys = enumerate_physical_basis(g, 1, sb);
        CHECK(phys.patterns.size() == 4);
        CHECK(phys.size() == 4);
        // strict containment in the mod-3 basis
        CHECK(enumerate_reduced_basis(g, 1).size() == 18);
        for (const auto& p : phys.patterns) CHECK(mod3_valid(g, p));
    }
    SUBCASE("two-plaquette string carries vertex multiplicity 2") {
        const auto g = LatticeGeometry::string_chain(2);
        const auto phys = enumerate_physical_basis(g, 1, sb);
        CHECK(phys.patterns.size() == 19);
        CHECK(phys.size() == 22);
        bool found_mult2 = false;
        for (const auto& dims : phys.mult_dims)
            for (int d : dims)
                if (d == 2) found_mult2 = true;
        CHECK(found_mult2);
        // index round trip
        for (long i = 0; i < phys.size(); ++i)
            CHECK(phys.index(phys.states[i].pattern, phys.states[i].mults) == i);
    }
}

TEST_CASE("gauge projector") {
    CGEngine cg;
    SingletBasisCache sb(cg);
    SUBCASE("identity on the empty lattice state") {
        const auto g = LatticeGeometry::string_chain(1);
        GaugeProjector proj(g, 1, sb);
        SparseVec vac;
        vac[proj.indexer().pack({0, 0, 0, 0})] = 1.0;
        const SparseVec pv = proj.apply(vac);
        REQUIRE(pv.size() == 1);
        CHECK(pv.begin()->second == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("idempotent and symmetric on random vectors") {
        const auto g = LatticeGeometry::string_chain(1);
        GaugeProjector proj(g, 1, sb);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(-1, 1);
        SparseVec v, w;
        for (int k = 0; k < 200; ++k) {
            std::vector<long> per(4);
            for (auto& x : per) x = static_cast<long>(rng() % proj.indexer().link_basis().size());
            v[proj.indexer().pack(per)] += uni(rng);
            for (auto& x : per) x = static_cast<long>(rng() % proj.indexer().link_basis().size());
            w[proj.indexer().pack(per)] += uni(rng);
        }
        const SparseVec pv = proj.apply(v);
        const SparseVec ppv = proj.apply(pv);
        double dev = 0.0;
        for (const auto& [k, x] : ppv) {
            auto it = pv.find(k);
            dev = std::max(dev, std::abs(x - (it == pv.end() ? 0.0 : it->second)));
        }
        for (const auto& [k, x] : pv)
            if (!ppv.count(k)) dev = std::max(dev, std::abs(x));
        CHECK(dev < 1e-12);
        // symmetry <w, Pv> = <Pw, v>
        CHECK(dot(w, pv) == doctest::Approx(dot(proj.apply(w), v)).epsilon(1e-10));
    }
    SUBCASE("rank on the plaquette equals the per-vertex null-space count") {
        const auto g = LatticeGeometry::string_chain(1);
        GaugeProjector proj(g, 1, sb);
        long expect = 0;
        for (const Pattern& p : enumerate_reduced_basis(g, 1)) {
            long m = 1;
            for (int v = 0; v < g.num_vertices; ++v) m *= vertex_nullspace_dim(g, p, v);
            expect += m;
        }
        CHECK(proj.rank() == expect);
        CHECK(proj.rank() == 4);
        // orthonormal basis
        for (size_t i = 0; i < proj.basis().size(); ++i)
            for (size_t j = i; j < proj.basis().size(); ++j) {
                const double d = dot(proj.basis()[i], proj.basis()[j]);
                CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
            }
    }
    SUBCASE("paired two-link contraction is retained; bare products are not") {
        // single-vertex projector on two collinear links in 3 through the
        // middle vertex; outer ends spectate
        const auto g = LatticeGeometry::custom(3, {{0, 1}, {1, 2}});
        const auto spec = vertex_end_spec(g, {R3, R3}, 1);
        CGEngine eng;
        SingletBasisCache cache(eng);
        const Eigen::MatrixXd& basis = cache.basis(spec);  // ends: (link0 head, link1 tail)
        REQUIRE(basis.rows() == 1);
        // paired state sum_s |s>|s>: invariant
        Eigen::VectorXd paired = Eigen::VectorXd::Zero(9);
        for (int s = 0; s < 3; ++s) paired(s * 3 + s) = 1.0 / std::sqrt(3.0);
        const double keep = (basis * paired).norm();
        CHECK(keep == doctest::Approx(1.0).epsilon(1e-12));
        // a bare product state |0>|1>: mostly removed
        Eigen::VectorXd product = Eigen::VectorXd::Zero(9);
        product(0 * 3 + 1) = 1.0;
        CHECK((basis * product).norm() < 1e-12);
        // |0>|0> keeps only its 1/3 singlet weight
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(9);
        diag(0) = 1.0;
        CHECK((basis * diag).norm() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("geometries") {
    SUBCASE("string chain") {
        const auto g = LatticeGeometry::string_chain(2);
        CHECK(g.num_vertices == 6);
        CHECK(g.links.size() == 7);
        CHECK(g.plaquettes.size() == 2);
        g.validate();
    }
    SUBCASE("2x2 grid") {
        const auto g = LatticeGeometry::grid(2, 2);
        CHECK(g.num_vertices == 9);
        CHECK(g.links.size() == 12);
        CHECK(g.plaquettes.size() == 4);
        g.validate();
    }
    SUBCASE("periodic string") {
        const auto g = LatticeGeometry::string_chain(2, Boundary::periodic);
        CHECK(g.num_vertices == 4);
        CHECK(g.links.size() == 6);
        g.validate();
        // per-vertex mod-3 only; counts surfaced for inspection
        CHECK(enumerate_reduced_basis(g, 1).size() > 0);
    }
}
