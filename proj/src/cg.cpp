#include "su3lgt/cg.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace su3lgt {

namespace {

constexpr const char* kConventionBase = "su3cg-gt-lex-v1";
constexpr const char* kConventionFlipped = "su3cg-gt-lex-v1-neg";

std::array<int, 2> state_weight(const WeightState& s) { return {s.twice_tz, s.y_times3}; }

std::string hexdouble(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_hexdouble(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

const CGTable::Block* CGTable::block(Irrep rout, int gamma) const {
    for (const auto& b : blocks_)
        if (b.rout == rout && b.gamma == gamma) return &b;
    return nullptr;
}

int CGTable::multiplicity(Irrep rout) const {
    int m = 0;
    for (const auto& b : blocks_)
        if (b.rout == rout) ++m;
    return m;
}

double CGTable::cg(Irrep rout, int a, int b, int c, int gamma) const {
    const Block* bl = block(rout, gamma);
    if (!bl) return 0.0;
    const long d2 = dimension(r2_);
    return bl->coeff(a * d2 + b, c);
}

double CGTable::orthogonality_residual() const {
    long cols = 0;
    for (const auto& b : blocks_) cols += b.coeff.cols();
    const long rows = dimension(r1_) * dimension(r2_);
    Eigen::MatrixXd u(rows, cols);
    long at = 0;
    for (const auto& b : blocks_) {
        u.block(0, at, rows, b.coeff.cols()) = b.coeff;
        at += b.coeff.cols();
    }
    return (u.transpose() * u - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff();
}

double CGTable::completeness_residual() const {
    long cols = 0;
    for (const auto& b : blocks_) cols += b.coeff.cols();
    const long rows = dimension(r1_) * dimension(r2_);
    Eigen::MatrixXd u(rows, cols);
    long at = 0;
    for (const auto& b : blocks_) {
        u.block(0, at, rows, b.coeff.cols()) = b.coeff;
        at += b.coeff.cols();
    }
    return (u * u.transpose() - Eigen::MatrixXd::Identity(rows, rows)).cwiseAbs().maxCoeff();
}

uint64_t CGTable::checksum() const {
    uint64_t h = fnv1a64("cg", 2);
    for (const auto& b : blocks_) {
        h = fnv1a64(&b.rout, sizeof b.rout, h);
        h = fnv1a64(&b.gamma, sizeof b.gamma, h);
        for (long j = 0; j < b.coeff.cols(); ++j)
            for (long i = 0; i < b.coeff.rows(); ++i) {
                const double v = b.coeff(i, j);
                h = fnv1a64(&v, sizeof v, h);
            }
    }
    return h;
}

const std::string& CGEngine::convention_id() const {
    static const std::string base = kConventionBase;
    static const std::string neg = kConventionFlipped;
    return opt_.flip_signs ? neg : base;
}

const CGTable& CGEngine::table(Irrep r1, Irrep r2) {
    const auto key = std::make_pair(r1, r2);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;

    if (!opt_.cache_dir.empty()) {
        std::filesystem::create_directories(opt_.cache_dir);
        std::ostringstream name;
        name << "cg_" << r1.p << "_" << r1.q << "__" << r2.p << "_" << r2.q << ".cgt";
        const auto file = opt_.cache_dir / name.str();
        if (std::filesystem::exists(file)) {
            auto t = std::make_unique<CGTable>(load(file, convention_id()));
            return *cache_.emplace(key, std::move(t)).first->second;
        }
        auto t = std::make_unique<CGTable>(build(r1, r2));
        save(*t, convention_id(), file);
        return *cache_.emplace(key, std::move(t)).first->second;
    }
    auto t = std::make_unique<CGTable>(build(r1, r2));
    return *cache_.emplace(key, std::move(t)).first->second;
}

double CGEngine::cg(const CGKey& key) {
    const CGTable& t = table(key.r1, key.r2);
    return t.cg(key.rout, key.a, key.b, key.c, key.gamma);
}

double CGEngine::verify_orthogonality(Irrep r1, Irrep r2) {
    return table(r1, r2).orthogonality_residual();
}

double CGEngine::verify_completeness(Irrep r1, Irrep r2) {
    return table(r1, r2).completeness_residual();
}

CGTable CGEngine::build(Irrep r1, Irrep r2) const {
    const long d1 = dimension(r1), d2 = dimension(r2);
    const long D = d1 * d2;
    if (D > opt_.product_dim_cap)
        throw std::runtime_error("CG product dimension " + std::to_string(D) +
                                 " exceeds cap " + std::to_string(opt_.product_dim_cap));

    const RepMatrices& g1 = rep_matrices(r1);
    const RepMatrices& g2 = rep_matrices(r2);
    auto prod = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(D, D);
        for (long i = 0; i < d1; ++i)
            for (long k = 0; k < d1; ++k)
                if (a(i, k) != 0.0) m.block(i * d2, k * d2, d2, d2) += a(i, k) * Eigen::MatrixXd::Identity(d2, d2);
        for (long i = 0; i < d1; ++i) m.block(i * d2, i * d2, d2, d2) += b;
        return m;
    };
    const Eigen::MatrixXd pE12 = prod(g1.e12, g2.e12);
    const Eigen::MatrixXd pE23 = prod(g1.e23, g2.e23);
    const Eigen::MatrixXd pE21 = prod(g1.e21, g2.e21);
    const Eigen::MatrixXd pE32 = prod(g1.e32, g2.e32);

    const auto w1 = enumerate_states(r1);
    const auto w2 = enumerate_states(r2);
    std::vector<std::array<int, 2>> wprod(D);
    for (long a = 0; a < d1; ++a)
        for (long b = 0; b < d2; ++b)
            wprod[a * d2 + b] = {w1[a].twice_tz + w2[b].twice_tz, w1[a].y_times3 + w2[b].y_times3};

    CGTable out;
    out.r1_ = r1;
    out.r2_ = r2;

    const auto decomp = tensor_decompose(r1, r2);
    for (const auto& [rout, mult] : decomp.terms) {
        const long dp = dimension(rout);
        const RepMatrices& gp = rep_matrices(rout);
        const auto wp = enumerate_states(rout);
        const std::array<int, 2> hw = {rout.p, rout.p + 2 * rout.q};

        std::vector<long> idx;
        for (long i = 0; i < D; ++i)
            if (wprod[i] == hw) idx.push_back(i);

        // raising operators restricted to the highest-weight subspace
        Eigen::MatrixXd m(2 * D, static_cast<long>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) {
            m.block(0, k, D, 1) = pE12.col(idx[k]);
            m.block(D, k, D, 1) = pE23.col(idx[k]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double tol = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
        long rank = 0;
        for (long i = 0; i < sv.size(); ++i)
            if (sv(i) > tol) ++rank;
        const long nullity = static_cast<long>(idx.size()) - rank;
        if (nullity != mult)
            throw std::runtime_error("CG null space mismatch for " + to_string(r1) + "x" +
                                     to_string(r2) + " -> " + to_string(rout));
        // deterministic orthonormal basis of the null space: Gram-Schmidt the
        // projector columns in lexicographic order of the product index
        const Eigen::MatrixXd ns = svd.matrixV().rightCols(nullity);
        const Eigen::MatrixXd proj = ns * ns.transpose();
        std::vector<Eigen::VectorXd> seeds;
        for (size_t k = 0; k < idx.size() && static_cast<long>(seeds.size()) < mult; ++k) {
            Eigen::VectorXd v = proj.col(k);
            for (const auto& b : seeds) v -= b.dot(v) * b;
            const double n = v.norm();
            if (n > 1e-8) seeds.push_back(v / n);
        }
        if (static_cast<long>(seeds.size()) != mult)
            throw std::runtime_error("CG multiplicity seeding failed");

        // locate the highest-weight canonical index of rout
        long cstar = -1;
        for (long c = 0; c < dp; ++c)
            if (state_weight(wp[c]) == hw && wp[c].twice_t == rout.p) cstar = c;
        if (cstar < 0) throw std::runtime_error("CG: highest weight state not found");

        for (int gamma = 0; gamma < mult; ++gamma) {
            Eigen::MatrixXd vecs = Eigen::MatrixXd::Zero(dp, D);  // row c: product-space vector
            std::vector<bool> known(dp, false);
            for (size_t k = 0; k < idx.size(); ++k) vecs(cstar, idx[k]) = seeds[gamma](k);
            known[cstar] = true;
            long nknown = 1;

            const Eigen::MatrixXd* lowers[2] = {&gp.e21, &gp.e32};
            const Eigen::MatrixXd* plowers[2] = {&pE21, &pE32};
            while (nknown < dp) {
                bool progress = false;
                for (int li = 0; li < 2; ++li) {
                    const Eigen::MatrixXd& L = *lowers[li];
                    for (long c = 0; c < dp; ++c) {
                        if (!known[c]) continue;
                        long unknown = -1;
                        int nunknown = 0;
                        for (long cp = 0; cp < dp; ++cp)
                            if (std::abs(L(cp, c)) > 1e-12 && !known[cp]) {
                                unknown = cp;
                                ++nunknown;
                            }
                        if (nunknown != 1) continue;
                        Eigen::VectorXd u = (*plowers[li]) * vecs.row(c).transpose();
                        for (long c2 = 0; c2 < dp; ++c2)
                            if (c2 != unknown && std::abs(L(c2, c)) > 1e-12)
                                u -= L(c2, c) * vecs.row(c2).transpose();
                        vecs.row(unknown) = (u / L(unknown, c)).transpose();
                        known[unknown] = true;
                        ++nknown;
                        progress = true;
                    }
                }
                if (progress) continue;
                // solve a full weight level by least squares
                long first = -1;
                std::array<int, 3> best{};
                for (long c = 0; c < dp; ++c) {
                    if (known[c]) continue;
                    const std::array<int, 3> key = {-wp[c].y_times3, -wp[c].twice_t, -wp[c].twice_tz};
                    if (first < 0 || key < best) {
                        first = c;
                        best = key;
                    }
                }
                if (first < 0) throw std::runtime_error("CG lowering stuck");
                std::vector<long> level;
                for (long c = 0; c < dp; ++c)
                    if (!known[c] && state_weight(wp[c]) == state_weight(wp[first]) ) level.push_back(c);
                std::vector<Eigen::VectorXd> rows;
                std::vector<Eigen::VectorXd> rhs;
                for (int li = 0; li < 2; ++li) {
                    const Eigen::MatrixXd& L = *lowers[li];
                    for (long c = 0; c < dp; ++c) {
                        if (!known[c]) continue;
                        Eigen::VectorXd row(level.size());
                        bool any = false;
                        for (size_t k = 0; k < level.size(); ++k) {
                            row(k) = L(level[k], c);
                            if (std::abs(row(k)) > 1e-12) any = true;
                        }
                        if (!any) continue;
                        Eigen::VectorXd u = (*plowers[li]) * vecs.row(c).transpose();
                        for (long c2 = 0; c2 < dp; ++c2)
                            if (known[c2] && std::abs(L(c2, c)) > 1e-12)
                                u -= L(c2, c) * vecs.row(c2).transpose();
                        rows.push_back(row);
                        rhs.push_back(u);
                    }
                }
                if (rows.empty()) throw std::runtime_error("CG lowering: no equations");
                Eigen::MatrixXd A(rows.size(), level.size());
                Eigen::MatrixXd B(rows.size(), D);
                for (size_t i = 0; i < rows.size(); ++i) {
                    A.row(i) = rows[i].transpose();
                    B.row(i) = rhs[i].transpose();
                }
                const Eigen::MatrixXd sol = A.colPivHouseholderQr().solve(B);
                for (size_t k = 0; k < level.size(); ++k) {
                    vecs.row(level[k]) = sol.row(k);
                    known[level[k]] = true;
                    ++nknown;
                }
            }

            CGTable::Block bl;
            bl.rout = rout;
            bl.gamma = gamma;
            bl.coeff = vecs.transpose();
            // sign: lexicographically smallest (a,b,c) nonzero entry positive
            const double cutoff = 1e-8 * bl.coeff.cwiseAbs().maxCoeff();
            bool done = false;
            for (long i = 0; i < D && !done; ++i)
                for (long c = 0; c < dp && !done; ++c)
                    if (std::abs(bl.coeff(i, c)) > cutoff) {
                        if (bl.coeff(i, c) < 0) bl.coeff = -bl.coeff;
                        done = true;
                    }
            if (opt_.flip_signs) bl.coeff = -bl.coeff;
            out.blocks_.push_back(std::move(bl));
        }
    }
    return out;
}

double CGEngine::vertex_factor_668(Irrep r1p, Irrep r2p, double* residual) {
    const Irrep r3{1, 0}, r8{1, 1}, r3b{0, 1}, r6{2, 0};
    if (!((r1p == r3b || r1p == r6) && (r2p == r3b || r2p == r6)))
        throw std::invalid_argument("vertex_factor_668: irreps must be 3bar or 6");
    const CGTable& t33 = table(r3, r3);
    const CGTable& t83 = table(r8, r3);
    const CGTable& t8r = table(r8, r2p);
    const long d1p = dimension(r1p), d2p = dimension(r2p);

    double num = 0.0, den = 0.0, maxdev = 0.0;
    std::vector<double> tvals(8 * d2p * d1p, 0.0), cvals(8 * d2p * d1p, 0.0);
    for (int l3 = 0; l3 < 8; ++l3)
        for (int l2p = 0; l2p < d2p; ++l2p)
            for (int r1pp = 0; r1pp < d1p; ++r1pp) {
                double s = 0.0;
                for (int beta = 0; beta < 3; ++beta)
                    for (int rr1 = 0; rr1 < 3; ++rr1)
                        for (int l2 = 0; l2 < 3; ++l2)
                            s += t33.cg(r1p, rr1, beta, r1pp) * t33.cg(r2p, l2, beta, l2p) *
                                 t83.cg(r3, l3, l2, rr1);
                const double c8 = t8r.cg(r1p, l3, l2p, r1pp);
                tvals[(l3 * d2p + l2p) * d1p + r1pp] = s;
                cvals[(l3 * d2p + l2p) * d1p + r1pp] = c8;
                num += s * c8;
                den += c8 * c8;
            }
    const double n = num / den;
    for (size_t i = 0; i < tvals.size(); ++i)
        maxdev = std::max(maxdev, std::abs(tvals[i] - n * cvals[i]));
    if (residual) *residual = maxdev;
    return n;
}

void CGEngine::save(const CGTable& t, const std::string& convention, const std::filesystem::path& file) {
    std::ostringstream body;
    const long d2 = dimension(t.r2());
    long records = 0;
    for (const auto& b : t.blocks()) records += b.coeff.rows() * b.coeff.cols();
    body << "su3lgt-cg v1\n";
    body << "convention " << convention << "\n";
    body << "r1 " << t.r1().p << " " << t.r1().q << "\n";
    body << "r2 " << t.r2().p << " " << t.r2().q << "\n";
    body << "blocks " << t.blocks().size() << "\n";
    uint64_t h = fnv1a64("su3lgt-cg", 9);
    for (const auto& b : t.blocks()) {
        body << "block " << b.rout.p << " " << b.rout.q << " " << b.gamma << " "
             << b.coeff.rows() * b.coeff.cols() << "\n";
        for (long i = 0; i < b.coeff.rows(); ++i)
            for (long c = 0; c < b.coeff.cols(); ++c) {
                const double v = b.coeff(i, c);
                if (v == 0.0) continue;
                std::ostringstream line;
                line << (i / d2) << " " << (i % d2) << " " << b.rout.p << " " << b.rout.q << " "
                     << c << " " << b.gamma << " " << hexdouble(v) << " ";
                const std::string s = surd_string(v);
                line << (s.empty() ? "-" : s);
                const std::string ls = line.str();
                h = fnv1a64(ls, h);
                body << ls << "\n";
            }
        body << "endblock\n";
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, h);
    body << "checksum " << hex << "\n";
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << body.str();
    if (!out) throw std::runtime_error("failed to write " + file.string());
}

CGTable CGEngine::load(const std::filesystem::path& file, const std::string& expect_convention) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string word;
    std::string magic, ver;
    in >> magic >> ver;
    if (magic != "su3lgt-cg" || ver != "v1") throw std::runtime_error("bad CG cache header");
    std::string conv;
    in >> word >> conv;
    if (!expect_convention.empty() && conv != expect_convention)
        throw std::runtime_error("CG cache convention mismatch: " + conv);
    CGTable t;
    int nblocks = 0;
    in >> word >> t.r1_.p >> t.r1_.q;
    in >> word >> t.r2_.p >> t.r2_.q;
    in >> word >> nblocks;
    const long d1 = dimension(t.r1_), d2 = dimension(t.r2_);
    uint64_t h = fnv1a64("su3lgt-cg", 9);
    for (int bi = 0; bi < nblocks; ++bi) {
        CGTable::Block b;
        long count = 0;
        in >> word >> b.rout.p >> b.rout.q >> b.gamma >> count;
        b.coeff = Eigen::MatrixXd::Zero(d1 * d2, dimension(b.rout));
        while (true) {
            in >> word;
            if (word == "endblock") break;
            int a = std::stoi(word);
            int bb, rp, rq, c, gamma;
            std::string hexv, surd;
            in >> bb >> rp >> rq >> c >> gamma >> hexv >> surd;
            std::ostringstream line;
            line << a << " " << bb << " " << rp << " " << rq << " " << c << " " << gamma << " "
                 << hexv << " " << surd;
            h = fnv1a64(line.str(), h);
            b.coeff(a * d2 + bb, c) = parse_hexdouble(hexv);
        }
        t.blocks_.push_back(std::move(b));
    }
    std::string hex;
    in >> word >> hex;
    if (word != "checksum") throw std::runtime_error("CG cache: missing checksum");
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016" PRIx64, h);
    if (hex != expect) throw std::runtime_error("CG cache checksum mismatch in " + file.string());
    return t;
}

std::string surd_string(double c) {
    if (c == 0.0) return "0";
    const double x = c * c;
    // continued-fraction rational reconstruction of c^2
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 32; ++it) {
        const double fl = std::floor(v);
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > 1000000) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(x - double(p1) / double(q1)) < 1e-12 * std::max(1.0, x)) {
            std::ostringstream os;
            if (c < 0) os << "-";
            os << "sqrt(" << p1 << "/" << q1 << ")";
            return os.str();
        }
        const double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return "";
}

uint64_t fnv1a64(const void* data, size_t n, uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t fnv1a64(const std::string& s, uint64_t seed) { return fnv1a64(s.data(), s.size(), seed); }

}  // namespace su3lgt
