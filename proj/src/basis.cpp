#include "su3lgt/basis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace su3lgt {

PatternIndexer::PatternIndexer(int nlinks, int lam) : nlinks_(nlinks), lam_(lam) {
    const uint64_t per = static_cast<uint64_t>((lam + 1)) * (lam + 1);
    size_ = 1;
    for (int i = 0; i < nlinks; ++i) {
        if (size_ > UINT64_MAX / per) throw std::overflow_error("pattern space too large");
        size_ *= per;
    }
}

uint64_t PatternIndexer::index(const Pattern& p) const {
    if (static_cast<int>(p.size()) != nlinks_) throw std::invalid_argument("pattern size mismatch");
    uint64_t idx = 0;
    const uint64_t per = static_cast<uint64_t>((lam_ + 1)) * (lam_ + 1);
    for (int l = 0; l < nlinks_; ++l) {
        const Irrep r = p[l];
        if (r.p < 0 || r.p > lam_ || r.q < 0 || r.q > lam_)
            throw std::out_of_range("irrep outside truncation");
        idx = idx * per + static_cast<uint64_t>(r.p * (lam_ + 1) + r.q);
    }
    return idx;
}

Pattern PatternIndexer::pattern(uint64_t idx) const {
    if (idx >= size_) throw std::out_of_range("pattern index out of range");
    const uint64_t per = static_cast<uint64_t>((lam_ + 1)) * (lam_ + 1);
    Pattern p(nlinks_);
    for (int l = nlinks_ - 1; l >= 0; --l) {
        const int v = static_cast<int>(idx % per);
        idx /= per;
        p[l] = {v / (lam_ + 1), v % (lam_ + 1)};
    }
    return p;
}

int PatternIndexer::bits_per_register() const {
    return static_cast<int>(std::ceil(std::log2(1.0 + lam_)));
}

uint64_t PatternIndexer::flip_bit(uint64_t idx, int link, int reg, int bit) const {
    Pattern p = pattern(idx);
    int v = reg == 0 ? p[link].p : p[link].q;
    v ^= 1 << bit;
    // flips landing outside the truncation wrap within the register width;
    // the register has exactly bits_per_register() bits
    v &= (1 << bits_per_register()) - 1;
    if (v > lam_) v = lam_;  // should not happen when 1+lam is a power of two
    (reg == 0 ? p[link].p : p[link].q) = v;
    return index(p);
}

bool mod3_valid_at(const LatticeGeometry& g, const Pattern& p, int vertex) {
    int t = 0;
    for (const auto& e : g.vertex_ends[vertex])
        t += e.is_head ? triality(p[e.link]) : -triality(p[e.link]);
    return ((t % 3) + 3) % 3 == 0;
}

bool mod3_valid(const LatticeGeometry& g, const Pattern& p) {
    for (int v = 0; v < g.num_vertices; ++v)
        if (!mod3_valid_at(g, p, v)) return false;
    return true;
}

std::vector<Pattern> enumerate_reduced_basis(const LatticeGeometry& g, int lam) {
    const int nl = static_cast<int>(g.links.size());
    const auto irreps = truncated_irreps(lam);
    // vertices whose last incident link (by id) is l: check as soon as assigned
    std::vector<std::vector<int>> complete_at(nl);
    for (int v = 0; v < g.num_vertices; ++v) {
        int last = -1;
        for (const auto& e : g.vertex_ends[v]) last = std::max(last, e.link);
        if (last >= 0) complete_at[last].push_back(v);
    }
    std::vector<Pattern> out;
    Pattern cur(nl, Irrep{0, 0});
    std::function<void(int)> rec = [&](int l) {
        if (l == nl) {
            out.push_back(cur);
            return;
        }
        for (const Irrep r : irreps) {
            cur[l] = r;
            bool ok = true;
            for (int v : complete_at[l])
                if (!mod3_valid_at(g, cur, v)) {
                    ok = false;
                    break;
                }
            if (ok) rec(l + 1);
        }
        cur[l] = {0, 0};
    };
    rec(0);
    return out;
}

ResourceReport qubit_count(int lam, long n_links) {
    if (lam < 1) throw std::invalid_argument("qubit_count: lam must be >= 1");
    ResourceReport r;
    r.lam = lam;
    auto clog2 = [](long x) { return static_cast<int>(std::ceil(std::log2(double(x)))); };
    r.irrep_qubits = 2 * clog2(1 + lam);
    r.local_qubits = 0;
    for (int j = 1; j <= 3; ++j) r.local_qubits += 2 * clog2(1 + 2 * j * lam);
    r.qubits_per_link = r.irrep_qubits + r.local_qubits;
    r.register_dims = {1 + 2 * lam, 1 + 4 * lam, 1 + 6 * lam};
    r.links = n_links;
    r.total_qubits = static_cast<long>(r.qubits_per_link) * n_links;
    return r;
}

const Eigen::MatrixXd& SingletBasisCache::basis(const EndSpec& ends) {
    auto it = cache_.find(ends);
    if (it != cache_.end()) return it->second;

    // standard irreps per end plus the dual-basis map for tails
    std::vector<Irrep> reps;
    std::vector<const Eigen::MatrixXd*> maps;  // nullptr = identity
    for (const auto& [r, is_head] : ends) {
        if (is_head) {
            reps.push_back(r);
            maps.push_back(nullptr);
        } else {
            reps.push_back(conjugate(r));
            maps.push_back(&conjugation_intertwiner(r));
        }
    }

    long prod_dim = 1;
    for (const Irrep r : reps) prod_dim *= dimension(r);

    Eigen::MatrixXd result(0, prod_dim);
    if (!reps.empty()) {
        // left-fold coupling; vec: (consumed product dim) x (current irrep dim)
        std::vector<std::pair<Irrep, Eigen::MatrixXd>> cur;
        cur.emplace_back(reps[0],
                         Eigen::MatrixXd::Identity(dimension(reps[0]), dimension(reps[0])));
        for (size_t k = 1; k < reps.size(); ++k) {
            const Irrep rk = reps[k];
            const long dk = dimension(rk);
            const bool last = (k + 1 == reps.size());
            std::vector<std::pair<Irrep, Eigen::MatrixXd>> nxt;
            for (const auto& [rc, vec] : cur) {
                const long dc = dimension(rc);
                const CGTable& t = cg_.table(rc, rk);
                for (const auto& bl : t.blocks()) {
                    if (last && bl.rout != Irrep{0, 0}) continue;
                    const long dp = dimension(bl.rout);
                    // nv[x*dk+j, m'] = sum_m vec[x,m] C[m*dk+j, m']
                    Eigen::MatrixXd nv = Eigen::MatrixXd::Zero(vec.rows() * dk, dp);
                    for (long m = 0; m < dc; ++m)
                        for (long j = 0; j < dk; ++j) {
                            const auto row = bl.coeff.row(m * dk + j);
                            if (row.cwiseAbs().maxCoeff() == 0.0) continue;
                            for (long x = 0; x < vec.rows(); ++x)
                                if (vec(x, m) != 0.0) nv.row(x * dk + j) += vec(x, m) * row;
                        }
                    nxt.emplace_back(bl.rout, std::move(nv));
                }
            }
            cur = std::move(nxt);
        }
        std::vector<Eigen::VectorXd> singlets;
        for (const auto& [rc, vec] : cur)
            if (rc == Irrep{0, 0}) singlets.push_back(vec.col(0));
        if (reps.size() == 1 && reps[0] == Irrep{0, 0})
            singlets.assign(1, Eigen::VectorXd::Ones(1));
        result.resize(static_cast<long>(singlets.size()), prod_dim);
        for (size_t i = 0; i < singlets.size(); ++i) result.row(i) = singlets[i].transpose();
    } else {
        result = Eigen::MatrixXd::Ones(1, 1);
    }

    // pull standard-basis components back to actual tail indices: u_i = sum_j Phi_ji s_j
    for (size_t k = 0; k < maps.size(); ++k) {
        if (!maps[k]) continue;
        const Eigen::MatrixXd& phi = *maps[k];
        const long d = phi.rows();
        long stride_after = 1;
        for (size_t j = k + 1; j < reps.size(); ++j) stride_after *= dimension(reps[j]);
        const long n_before = prod_dim / (d * stride_after);
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(result.rows(), prod_dim);
        for (long row = 0; row < result.rows(); ++row)
            for (long b = 0; b < n_before; ++b)
                for (long i = 0; i < d; ++i) {
                    double acc_scale = 0.0;
                    (void)acc_scale;
                    for (long j = 0; j < d; ++j) {
                        const double f = phi(j, i);
                        if (f == 0.0) continue;
                        out.block(row, (b * d + i) * stride_after, 1, stride_after) +=
                            f * result.block(row, (b * d + j) * stride_after, 1, stride_after);
                    }
                }
        result = std::move(out);
    }
    return cache_.emplace(ends, std::move(result)).first->second;
}

SingletBasisCache::EndSpec vertex_end_spec(const LatticeGeometry& g, const Pattern& p, int vertex) {
    SingletBasisCache::EndSpec ends;
    for (const auto& e : g.vertex_ends[vertex]) ends.emplace_back(p[e.link], e.is_head);
    return ends;
}

long PhysicalBasis::index(const Pattern& p, const std::vector<int>& mults) const {
    std::vector<int> key(p.size());
    for (size_t i = 0; i < p.size(); ++i) key[i] = p[i].p * 1024 + p[i].q;
    auto it = pattern_pos.find(key);
    if (it == pattern_pos.end()) return -1;
    const long pos = it->second;
    const auto& dims = mult_dims[pos];
    long off = 0;
    for (size_t v = 0; v < mults.size(); ++v) {
        if (mults[v] < 0 || mults[v] >= dims[v]) return -1;
        off = off * dims[v] + mults[v];
    }
    return pattern_first_[pos] + off;
}

PhysicalBasis enumerate_physical_basis(const LatticeGeometry& g, int lam, SingletBasisCache& sb) {
    PhysicalBasis out;
    for (const Pattern& p : enumerate_reduced_basis(g, lam)) {
        std::vector<int> dims(g.num_vertices);
        bool ok = true;
        long total = 1;
        for (int v = 0; v < g.num_vertices && ok; ++v) {
            dims[v] = sb.multiplicity(vertex_end_spec(g, p, v));
            if (dims[v] == 0) ok = false;
            total *= dims[v];
        }
        if (!ok) continue;
        std::vector<int> key(p.size());
        for (size_t i = 0; i < p.size(); ++i) key[i] = p[i].p * 1024 + p[i].q;
        out.pattern_pos[key] = static_cast<long>(out.patterns.size());
        out.patterns.push_back(p);
        out.mult_dims.push_back(dims);
        out.pattern_first_.push_back(static_cast<long>(out.states.size()));
        std::vector<int> m(g.num_vertices, 0);
        for (long c = 0; c < total; ++c) {
            long x = c;
            for (int v = g.num_vertices - 1; v >= 0; --v) {
                m[v] = static_cast<int>(x % dims[v]);
                x /= dims[v];
            }
            out.states.push_back({p, m});
        }
    }
    return out;
}

}  // namespace su3lgt
