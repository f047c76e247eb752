#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "su3lgt/cg.hpp"

using namespace su3lgt;

namespace {
const Irrep R1{0, 0}, R3{1, 0}, R3B{0, 1}, R6{2, 0}, R6B{0, 2}, R8{1, 1};
const std::vector<Irrep> kFamily = {R1, R3, R3B, R6, R6B, R8};

std::string table_text(const CGTable& t, const std::string& conv) {
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("cgdump_" + std::to_string(::getpid()) + ".cgt");
    CGEngine::save(t, conv, tmp);
    std::ifstream in(tmp, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    std::filesystem::remove(tmp);
    return os.str();
}
}  // namespace

TEST_CASE("trivial product") {
    CGEngine cg;
    const CGTable& t = cg.table(R1, R1);
    REQUIRE(t.blocks().size() == 1);
    CHECK(t.blocks()[0].rout == R1);
    CHECK(t.cg(R1, 0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("3 x 3bar singlet is delta_ij / sqrt(3)") {
    CGEngine cg;
    const CGTable& t = cg.table(R3, R3B);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double expect = i == j ? 1.0 / std::sqrt(3.0) : 0.0;
            CHECK(t.cg(R1, i, j, 0) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("3 x 3 exchange symmetry") {
    // oracle: the swap operator on the 9-dim product space has the 3bar block
    // in its -1 eigenspace and the 6 block in its +1 eigenspace
    CGEngine cg;
    const CGTable& t = cg.table(R3, R3);
    auto swap_residual = [&](Irrep rout, double sign) {
        const CGTable::Block* b = t.block(rout, 0);
        REQUIRE(b != nullptr);
        double dev = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int bb = 0; bb < 3; ++bb)
                for (long c = 0; c < dimension(rout); ++c)
                    dev = std::max(dev, std::abs(b->coeff(bb * 3 + a, c) -
                                                 sign * b->coeff(a * 3 + bb, c)));
        return dev;
    };
    CHECK(swap_residual(R3B, -1.0) < 1e-12);
    CHECK(swap_residual(R6, +1.0) < 1e-12);
}

TEST_CASE("orthonormality and completeness across the family") {
    CGEngine cg;
    for (const Irrep a : kFamily)
        for (const Irrep b : kFamily) {
            CHECK(cg.verify_orthogonality(a, b) <= 1e-12);
            CHECK(cg.verify_completeness(a, b) <= 1e-12);
        }
}

TEST_CASE("selection rules: weights add") {
    CGEngine cg;
    std::mt19937_64 rng(42);
    for (const Irrep a : {R3, R8, R6}) {
        for (const Irrep b : {R3, R3B}) {
            const CGTable& t = cg.table(a, b);
            const auto wa = enumerate_states(a);
            const auto wb = enumerate_states(b);
            for (const auto& blk : t.blocks()) {
                const auto wc = enumerate_states(blk.rout);
                for (int trial = 0; trial < 60; ++trial) {
                    const int i = static_cast<int>(rng() % wa.size());
                    const int j = static_cast<int>(rng() % wb.size());
                    const int c = static_cast<int>(rng() % wc.size());
                    if (wa[i].twice_tz + wb[j].twice_tz != wc[c].twice_tz ||
                        wa[i].y_times3 + wb[j].y_times3 != wc[c].y_times3)
                        CHECK(t.cg(blk.rout, i, j, c) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("column normalization") {
    CGEngine cg;
    const CGTable& t = cg.table(R8, R3);
    for (const auto& blk : t.blocks())
        for (long c = 0; c < blk.coeff.cols(); ++c)
            CHECK(blk.coeff.col(c).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase convention: first nonzero entry positive") {
    CGEngine cg;
    for (const Irrep a : kFamily)
        for (const Irrep b : kFamily)
            for (const auto& blk : cg.table(a, b).blocks()) {
                const double cutoff = 1e-8 * blk.coeff.cwiseAbs().maxCoeff();
                bool found = false;
                for (long i = 0; i < blk.coeff.rows() && !found; ++i)
                    for (long c = 0; c < blk.coeff.cols() && !found; ++c)
                        if (std::abs(blk.coeff(i, c)) > cutoff) {
                            CHECK(blk.coeff(i, c) > 0);
                            found = true;
                        }
                CHECK(found);
            }
}

TEST_CASE("vertex factors reproduce the 6-6-8 coefficients") {
    CGEngine cg;
    double resid = 0.0;
    CHECK(std::abs(cg.vertex_factor_668(R3B, R3B, &resid)) ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(resid < 1e-12);
    CHECK(std::abs(cg.vertex_factor_668(R6, R6, &resid)) ==
          doctest::Approx(std::sqrt(10.0) / 4.0).epsilon(1e-10));
    CHECK(resid < 1e-12);
    CHECK(std::abs(cg.vertex_factor_668(R3B, R6, &resid)) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-10));
    CHECK(resid < 1e-12);
    CHECK(std::abs(cg.vertex_factor_668(R6, R3B, &resid)) ==
          doctest::Approx(std::sqrt(3.0) / (2.0 * std::sqrt(2.0))).epsilon(1e-10));
    CHECK(resid < 1e-12);
    CHECK_THROWS_AS(cg.vertex_factor_668(R8, R6), std::invalid_argument);
}

TEST_CASE("rebuild determinism") {
    CGEngine a, b;
    for (const Irrep r2 : {R3, R3B, R8}) {
        const std::string ta = table_text(a.table(R8, r2), a.convention_id());
        const std::string tb = table_text(b.table(R8, r2), b.convention_id());
        CHECK(ta == tb);
    }
}

TEST_CASE("cache file round trip is bit exact") {
    CGEngine cg;
    const CGTable& t = cg.table(R6, R3B);
    const auto tmp = std::filesystem::temp_directory_path() / "su3lgt_cg_roundtrip.cgt";
    CGEngine::save(t, cg.convention_id(), tmp);
    const CGTable back = CGEngine::load(tmp, cg.convention_id());
    REQUIRE(back.blocks().size() == t.blocks().size());
    for (size_t k = 0; k < t.blocks().size(); ++k) {
        CHECK(back.blocks()[k].rout == t.blocks()[k].rout);
        CHECK((back.blocks()[k].coeff - t.blocks()[k].coeff).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(back.checksum() == t.checksum());

    SUBCASE("corruption is detected") {
        std::ifstream in(tmp, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        const auto pos = text.find("0x1");
        REQUIRE(pos != std::string::npos);
        text[pos + 2] = text[pos + 2] == '1' ? '2' : '1';
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.close();
        CHECK_THROWS(CGEngine::load(tmp, cg.convention_id()));
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("cache directory reuse") {
    const auto dir = std::filesystem::temp_directory_path() / "su3lgt_cgcache_test";
    std::filesystem::remove_all(dir);
    {
        CGEngine cg({false, 2048, dir});
        (void)cg.table(R3, R3);
        CHECK(std::filesystem::exists(dir / "cg_1_0__1_0.cgt"));
    }
    {
        CGEngine cg({false, 2048, dir});
        const CGTable& t = cg.table(R3, R3);  // loaded from disk
        CHECK(t.orthogonality_residual() <= 1e-12);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sign flip negates every coefficient") {
    CGEngine plain, flipped({true, 2048, {}});
    CHECK(plain.convention_id() != flipped.convention_id());
    const CGTable& a = plain.table(R3, R3);
    const CGTable& b = flipped.table(R3, R3);
    for (size_t k = 0; k < a.blocks().size(); ++k)
        CHECK((a.blocks()[k].coeff + b.blocks()[k].coeff).cwiseAbs().maxCoeff() == 0.0);
    // vertex factor magnitudes are convention independent
    double r1 = 0, r2 = 0;
    CHECK(std::abs(plain.vertex_factor_668(R6, R3B, &r1)) ==
          doctest::Approx(std::abs(flipped.vertex_factor_668(R6, R3B, &r2))).epsilon(1e-12));
}

TEST_CASE("size cap") {
    CGEngine cg({false, 8, {}});
    CHECK_THROWS(cg.table(R8, R8));
}

TEST_CASE("surd strings") {
    CHECK(surd_string(1.0 / std::sqrt(3.0)) == "sqrt(1/3)");
    CHECK(surd_string(-std::sqrt(10.0) / 4.0) == "-sqrt(5/8)");
    CHECK(surd_string(0.5) == "sqrt(1/4)");
}
