#include <doctest.h>

#include "su3lgt/linkop.hpp"

using namespace su3lgt;

namespace {
const Irrep R1{0, 0}, R3{1, 0}, R3B{0, 1}, R6{2, 0}, R8{1, 1};
}

TEST_CASE("action on the singlet link") {
    CGEngine cg;
    // U^3_{ab}|1,0,0> = (1/sqrt 3)|3,a,b>
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const auto out = apply_link_op(cg, a, b, {R1, 0, 0}, 1);
            REQUIRE(out.size() == 1);
            CHECK(out[0].out.irrep == R3);
            CHECK(out[0].out.left == a);
            CHECK(out[0].out.right == b);
            CHECK(out[0].amplitude == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
        }
}

TEST_CASE("action on a fundamental link matches CG products") {
    CGEngine cg;
    const CGTable& t = cg.table(R3, R3);
    for (const auto& el : apply_link_op(cg, 0, 1, {R3, 1, 2}, 2)) {
        const double pref = std::sqrt(3.0 / dimension(el.out.irrep));
        const double expect = pref * t.cg(el.out.irrep, 1, 0, el.out.left) *
                              t.cg(el.out.irrep, 2, 1, el.out.right);
        CHECK(el.amplitude == doctest::Approx(expect).epsilon(1e-13));
        CHECK((el.out.irrep == R3B || el.out.irrep == R6));
    }
    // at lambda 1 the 6 channel is truncated away
    for (const auto& el : apply_link_op(cg, 0, 1, {R3, 1, 2}, 1)) CHECK(el.out.irrep == R3B);
}

TEST_CASE("truncation on the adjoint link") {
    CGEngine cg;
    // 8 x 3 = 3 + 6bar + 15; at lambda 1 only the 3 survives
    for (int a = 0; a < 8; ++a)
        for (const auto& el : apply_link_op(cg, 1, 2, {R8, a, a}, 1))
            CHECK(el.out.irrep == R3);
}

TEST_CASE("matrix on the truncated link basis") {
    CGEngine cg;
    SUBCASE("lambda 0 gives the 1x1 zero matrix") {
        const auto m = link_op_matrix(cg, 0, 0, 0);
        CHECK(m.rows() == 1);
        CHECK(m.nonZeros() == 0);
    }
    SUBCASE("lambda 1 basis dimension is 83") {
        CHECK(LinkBasis(1).size() == 83);
        const auto m = link_op_matrix(cg, 0, 0, 1);
        CHECK(m.rows() == 83);
    }
    SUBCASE("column norms bounded by 1; saturated only without truncation") {
        // sum over (alpha, beta) of squared amplitudes per input state
        const LinkBasis lb(1);
        Eigen::VectorXd colnorm = Eigen::VectorXd::Zero(lb.size());
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const auto m = link_op_matrix(cg, a, b, 1);
                for (long c = 0; c < m.cols(); ++c)
                    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
                        colnorm(c) += it.value() * it.value();
            }
        for (long c = 0; c < lb.size(); ++c) {
            CHECK(colnorm(c) <= 3.0 + 1e-12);  // sum_{a,b} |U|^2 <= dim(3) ... saturates at 3
            const Irrep r = lb.states[c].irrep;
            const bool untruncated = r == R1;  // 1x3=3 fully kept at lambda 1
            if (untruncated) CHECK(colnorm(c) == doctest::Approx(3.0).epsilon(1e-12));
            if (r == R3) CHECK(colnorm(c) < 3.0 - 0.1);  // the 6 channel was dropped
        }
    }
    SUBCASE("adjoint equals transpose for the real matrices") {
        const auto m = link_op_matrix(cg, 2, 1, 1);
        const Eigen::MatrixXd d(m);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() > 0);  // not symmetric itself
        CHECK((Eigen::MatrixXd(m.transpose()) - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("through-vertex contraction reproduces the paired-state transition") {
    CGEngine cg;
    const int lam = 2;
    const CGTable& t33 = cg.table(R3, R3);
    for (int l1 = 0; l1 < 3; ++l1)
        for (int r2 = 0; r2 < 3; ++r2)
            for (int alpha = 0; alpha < 3; ++alpha)
                for (int gamma = 0; gamma < 3; ++gamma) {
                    const auto out = contracted_two_link(cg, R3, l1, r2, alpha, gamma, lam);
                    // expected: sum_{R',l1',s',r2'} (1/dim R') C(3 l1;3 a|R' l1')
                    //           C(3 r2;3 g|R' r2') |R',l1',s'>|R',s',r2'>
                    std::map<std::pair<LinkState, LinkState>, double> expect;
                    for (const Irrep rp : {R3B, R6}) {
                        const long dp = dimension(rp);
                        for (int l1p = 0; l1p < dp; ++l1p)
                            for (int r2p = 0; r2p < dp; ++r2p) {
                                const double amp = t33.cg(rp, l1, alpha, l1p) *
                                                   t33.cg(rp, r2, gamma, r2p) / double(dp);
                                if (amp == 0.0) continue;
                                for (int sp = 0; sp < dp; ++sp)
                                    expect[{{rp, l1p, sp}, {rp, sp, r2p}}] = amp;
                            }
                    }
                    for (const auto& term : out) {
                        auto it = expect.find({term.first, term.second});
                        const double want = it == expect.end() ? 0.0 : it->second;
                        CHECK(std::abs(term.amplitude - want) < 1e-12);
                    }
                    for (const auto& [key, want] : expect) {
                        bool found = false;
                        for (const auto& term : out)
                            if (term.first == key.first && term.second == key.second) {
                                found = true;
                                CHECK(term.amplitude == doctest::Approx(want).epsilon(1e-12));
                            }
                        if (std::abs(want) > 1e-12) CHECK(found);
                    }
                }
}

TEST_CASE("flux-reversal hierarchy: amplitudes weighted by 1/dim") {
    CGEngine cg;
    // scan components; the per-channel weight amplitude / (C C) is 1/dim(R')
    const CGTable& t33 = cg.table(R3, R3);
    double a3b = 0.0, a6 = 0.0;
    for (int l1 = 0; l1 < 3; ++l1)
        for (int r2 = 0; r2 < 3; ++r2)
            for (const auto& term : contracted_two_link(cg, R3, l1, r2, 0, 1, 2)) {
                if (term.first.irrep != term.second.irrep || term.first.right != term.second.left)
                    continue;
                const double c1 = t33.cg(term.first.irrep, l1, 0, term.first.left);
                const double c2 = t33.cg(term.first.irrep, r2, 1, term.second.right);
                if (std::abs(c1 * c2) < 1e-12) continue;
                const double weight = term.amplitude / (c1 * c2);
                if (term.first.irrep == R3B) a3b = std::max(a3b, std::abs(weight));
                if (term.first.irrep == R6) a6 = std::max(a6, std::abs(weight));
            }
    REQUIRE(a3b > 0);
    REQUIRE(a6 > 0);
    CHECK(a3b / a6 == doctest::Approx(double(dimension(R6)) / dimension(R3B)).epsilon(1e-12));
    // probability ratio (dim 6 / dim 3bar)^2
    CHECK((a3b * a3b) / (a6 * a6) == doctest::Approx(4.0).epsilon(1e-12));
}
