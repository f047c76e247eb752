#include "su3lgt/fullbasis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace su3lgt {

FullBasisIndexer::FullBasisIndexer(const LatticeGeometry& g, int lam)
    : lb_(lam), nlinks_(static_cast<int>(g.links.size())) {
    strides_.assign(nlinks_, 1);
    const uint64_t d = static_cast<uint64_t>(lb_.size());
    for (int l = nlinks_ - 2; l >= 0; --l) {
        if (strides_[l + 1] > UINT64_MAX / d) throw std::overflow_error("full basis too large");
        strides_[l] = strides_[l + 1] * d;
    }
    if (strides_[0] > UINT64_MAX / d) throw std::overflow_error("full basis too large");
}

uint64_t FullBasisIndexer::pack(const std::vector<long>& per_link) const {
    uint64_t key = 0;
    for (int l = 0; l < nlinks_; ++l) key += strides_[l] * static_cast<uint64_t>(per_link[l]);
    return key;
}

std::vector<long> FullBasisIndexer::unpack(uint64_t key) const {
    std::vector<long> out(nlinks_);
    for (int l = 0; l < nlinks_; ++l) {
        out[l] = static_cast<long>(key / strides_[l]);
        key %= strides_[l];
    }
    return out;
}

double FullBasisIndexer::total_dimension() const {
    return std::pow(static_cast<double>(lb_.size()), nlinks_);
}

double dot(const SparseVec& a, const SparseVec& b) {
    const SparseVec& small = a.size() <= b.size() ? a : b;
    const SparseVec& big = a.size() <= b.size() ? b : a;
    double s = 0.0;
    for (const auto& [k, v] : small) {
        auto it = big.find(k);
        if (it != big.end()) s += v * it->second;
    }
    return s;
}

double norm(const SparseVec& a) { return std::sqrt(dot(a, a)); }

SparseVec gi_full_state(const LatticeGeometry& g, const FullBasisIndexer& ix,
                        SingletBasisCache& sb, const Pattern& p, const std::vector<int>& mults) {
    const int nl = static_cast<int>(g.links.size());
    struct VT {
        std::vector<VertexEnd> ends;
        std::vector<std::pair<std::vector<int>, double>> entries;  // end indices -> coeff
    };
    std::vector<VT> tensors;
    for (int v = 0; v < g.num_vertices; ++v) {
        const auto spec = vertex_end_spec(g, p, v);
        const Eigen::MatrixXd& basis = sb.basis(spec);
        if (basis.rows() == 0) return {};
        VT t;
        t.ends = g.vertex_ends[v];
        std::vector<long> dims;
        for (const auto& e : t.ends) dims.push_back(dimension(p[e.link]));
        const Eigen::VectorXd row = basis.row(mults[v]).transpose();
        for (long flat = 0; flat < row.size(); ++flat) {
            if (std::abs(row(flat)) < 1e-15) continue;
            std::vector<int> idx(dims.size());
            long x = flat;
            for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
                idx[k] = static_cast<int>(x % dims[k]);
                x /= dims[k];
            }
            t.entries.emplace_back(std::move(idx), row(flat));
        }
        tensors.push_back(std::move(t));
    }

    SparseVec out;
    std::vector<int> ab(2 * nl, 0);  // a_l at 2l, b_l at 2l+1
    std::function<void(size_t, double)> rec = [&](size_t vi, double coef) {
        if (vi == tensors.size()) {
            std::vector<long> per_link(nl);
            for (int l = 0; l < nl; ++l)
                per_link[l] = ix.link_basis().index({p[l], ab[2 * l], ab[2 * l + 1]});
            out[ix.pack(per_link)] += coef;
            return;
        }
        const VT& t = tensors[vi];
        for (const auto& [idx, c] : t.entries) {
            for (size_t k = 0; k < t.ends.size(); ++k)
                ab[2 * t.ends[k].link + (t.ends[k].is_head ? 1 : 0)] = idx[k];
            rec(vi + 1, coef * c);
        }
    };
    rec(0, 1.0);
    return out;
}

namespace {

// per (link-basis in-index) list of (out-index, amplitude)
using OpMap = std::vector<std::vector<std::pair<long, double>>>;

OpMap op_map_forward(CGEngine& cg, const LinkBasis& lb, int alpha, int beta) {
    OpMap m(lb.size());
    for (long i = 0; i < lb.size(); ++i)
        for (const auto& el : apply_link_op(cg, alpha, beta, lb.states[i], lb.lam))
            m[i].emplace_back(lb.index(el.out), el.amplitude);
    return m;
}

OpMap transpose_map(const OpMap& m, long n) {
    OpMap t(n);
    for (long i = 0; i < static_cast<long>(m.size()); ++i)
        for (const auto& [j, v] : m[i]) t[j].emplace_back(i, v);
    return t;
}

}  // namespace

SparseVec apply_plaquette(const LatticeGeometry& g, const FullBasisIndexer& ix, CGEngine& cg,
                          int plaquette, const SparseVec& v, long nnz_cap) {
    const Plaquette& pl = g.plaquettes.at(plaquette);
    const LinkBasis& lb = ix.link_basis();
    // cache the 9 forward op maps and their transposes
    static thread_local std::map<std::pair<int, std::pair<int, int>>, OpMap> fwd_cache;
    auto fwd = [&](int a, int b) -> const OpMap& {
        auto key = std::make_pair(lb.lam, std::make_pair(a, b));
        auto it = fwd_cache.find(key);
        if (it == fwd_cache.end())
            it = fwd_cache.emplace(key, op_map_forward(cg, lb, a, b)).first;
        return it->second;
    };
    static thread_local std::map<std::pair<int, std::pair<int, int>>, OpMap> adj_cache;
    auto adj = [&](int a, int b) -> const OpMap& {
        auto key = std::make_pair(lb.lam, std::make_pair(a, b));
        auto it = adj_cache.find(key);
        if (it == adj_cache.end())
            it = adj_cache.emplace(key, transpose_map(fwd(a, b), lb.size())).first;
        return it->second;
    };

    // fundamental index slot per plaquette vertex; each link component carries
    // (index at stored tail, index at stored head) whichever way it is traversed
    std::map<int, int> vslot;
    for (int k = 0; k < 4; ++k) {
        const auto& l = g.links[pl.links[k]];
        if (!vslot.count(l.tail)) vslot[l.tail] = static_cast<int>(vslot.size());
        if (!vslot.count(l.head)) vslot[l.head] = static_cast<int>(vslot.size());
    }
    if (vslot.size() != 4) throw std::runtime_error("apply_plaquette: degenerate plaquette");

    SparseVec total;
    int tau[4];
    for (tau[0] = 0; tau[0] < 3; ++tau[0])
        for (tau[1] = 0; tau[1] < 3; ++tau[1])
            for (tau[2] = 0; tau[2] < 3; ++tau[2])
                for (tau[3] = 0; tau[3] < 3; ++tau[3]) {
                    SparseVec cur = v;
                    for (int k = 0; k < 4 && !cur.empty(); ++k) {
                        const int l = pl.links[k];
                        const int a = tau[vslot.at(g.links[l].tail)];
                        const int b = tau[vslot.at(g.links[l].head)];
                        const OpMap& om = pl.forward[k] ? fwd(a, b) : adj(a, b);
                        SparseVec nxt;
                        nxt.reserve(cur.size());
                        for (const auto& [key, c] : cur) {
                            auto per = ix.unpack(key);
                            const long in = per[l];
                            for (const auto& [out, amp] : om[in]) {
                                per[l] = out;
                                nxt[ix.pack(per)] += c * amp;
                                per[l] = in;
                            }
                        }
                        cur = std::move(nxt);
                        if (static_cast<long>(cur.size()) > nnz_cap)
                            throw std::runtime_error("apply_plaquette: nnz cap exceeded");
                    }
                    for (const auto& [k, c] : cur)
                        if (c != 0.0) total[k] += c;
                    if (static_cast<long>(total.size()) > nnz_cap)
                        throw std::runtime_error("apply_plaquette: nnz cap exceeded");
                }
    // drop exact-cancellation dust
    for (auto it = total.begin(); it != total.end();)
        it = std::abs(it->second) < 1e-300 ? total.erase(it) : std::next(it);
    return total;
}

Eigen::MatrixXd plaquette_matrix(const LatticeGeometry& g, const FullBasisIndexer& ix, CGEngine& cg,
                                 int plaquette, const std::vector<SparseVec>& bras,
                                 const std::vector<SparseVec>& kets) {
    Eigen::MatrixXd m(bras.size(), kets.size());
    for (size_t j = 0; j < kets.size(); ++j) {
        const SparseVec img = apply_plaquette(g, ix, cg, plaquette, kets[j]);
        for (size_t i = 0; i < bras.size(); ++i) m(i, j) = dot(bras[i], img);
    }
    return m;
}

GaugeProjector::GaugeProjector(const LatticeGeometry& g, int lam, SingletBasisCache& sb)
    : ix_(g, lam), phys_(enumerate_physical_basis(g, lam, sb)) {
    for (const auto& st : phys_.states)
        states_.push_back(gi_full_state(g, ix_, sb, st.pattern, st.mults));
}

SparseVec GaugeProjector::apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& s : states_) {
        const double c = dot(s, v);
        if (c == 0.0) continue;
        for (const auto& [k, x] : s) out[k] += c * x;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tensor network contraction
// ---------------------------------------------------------------------------

namespace {

struct Tensor {
    std::vector<std::string> labels;
    std::vector<long> dims;
    std::vector<double> data;  // row-major

    long size() const { return static_cast<long>(data.size()); }
};

Tensor permuted(const Tensor& t, const std::vector<int>& order) {
    Tensor out;
    out.labels.resize(t.labels.size());
    out.dims.resize(t.dims.size());
    for (size_t k = 0; k < order.size(); ++k) {
        out.labels[k] = t.labels[order[k]];
        out.dims[k] = t.dims[order[k]];
    }
    out.data.assign(t.data.size(), 0.0);
    std::vector<long> strides(t.dims.size(), 1);
    for (int k = static_cast<int>(t.dims.size()) - 2; k >= 0; --k)
        strides[k] = strides[k + 1] * t.dims[k + 1];
    std::vector<long> ostr(order.size(), 1);
    for (int k = static_cast<int>(order.size()) - 2; k >= 0; --k)
        ostr[k] = ostr[k + 1] * out.dims[k + 1];
    std::vector<long> idx(t.dims.size(), 0);
    for (long flat = 0; flat < t.size(); ++flat) {
        long rem = flat;
        long oflat = 0;
        for (size_t k = 0; k < t.dims.size(); ++k) {
            idx[k] = rem / strides[k];
            rem %= strides[k];
        }
        for (size_t k = 0; k < order.size(); ++k) oflat += idx[order[k]] * ostr[k];
        out.data[oflat] = t.data[flat];
    }
    return out;
}

Tensor contract_pair(const Tensor& a, const Tensor& b) {
    std::vector<std::string> shared;
    for (const auto& l : a.labels)
        if (std::find(b.labels.begin(), b.labels.end(), l) != b.labels.end()) shared.push_back(l);
    std::vector<int> ao, bo;
    std::vector<std::string> alab, blab;
    for (size_t k = 0; k < a.labels.size(); ++k)
        if (std::find(shared.begin(), shared.end(), a.labels[k]) == shared.end()) {
            ao.push_back(static_cast<int>(k));
            alab.push_back(a.labels[k]);
        }
    for (const auto& l : shared)
        ao.push_back(static_cast<int>(std::find(a.labels.begin(), a.labels.end(), l) - a.labels.begin()));
    for (const auto& l : shared)
        bo.push_back(static_cast<int>(std::find(b.labels.begin(), b.labels.end(), l) - b.labels.begin()));
    for (size_t k = 0; k < b.labels.size(); ++k)
        if (std::find(shared.begin(), shared.end(), b.labels[k]) == shared.end()) {
            bo.push_back(static_cast<int>(k));
            blab.push_back(b.labels[k]);
        }
    const Tensor ap = permuted(a, ao);
    const Tensor bp = permuted(b, bo);
    long m = 1, kdim = 1, n = 1;
    for (size_t k = 0; k < alab.size(); ++k) m *= ap.dims[k];
    for (size_t k = alab.size(); k < ap.dims.size(); ++k) kdim *= ap.dims[k];
    for (size_t k = shared.size(); k < bp.dims.size(); ++k) n *= bp.dims[k];
    Tensor out;
    out.labels = alab;
    out.labels.insert(out.labels.end(), blab.begin(), blab.end());
    for (size_t k = 0; k < alab.size(); ++k) out.dims.push_back(ap.dims[k]);
    for (size_t k = shared.size(); k < bp.dims.size(); ++k) out.dims.push_back(bp.dims[k]);
    out.data.assign(m * n, 0.0);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> ma(
        ap.data.data(), m, kdim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mb(
        bp.data.data(), kdim, n);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mo(
        out.data.data(), m, n);
    mo = ma * mb;
    return out;
}

Tensor contract_all(std::vector<Tensor> ts, const std::vector<std::string>& open) {
    while (ts.size() > 1) {
        long best_sz = -1;
        size_t bi = 0, bj = 1;
        bool found = false;
        for (size_t i = 0; i < ts.size(); ++i)
            for (size_t j = i + 1; j < ts.size(); ++j) {
                bool share = false;
                for (const auto& l : ts[i].labels)
                    if (std::find(ts[j].labels.begin(), ts[j].labels.end(), l) != ts[j].labels.end()) {
                        share = true;
                        break;
                    }
                if (!share) continue;
                long sz = 1;
                for (size_t k = 0; k < ts[i].labels.size(); ++k)
                    if (std::find(ts[j].labels.begin(), ts[j].labels.end(), ts[i].labels[k]) ==
                        ts[j].labels.end())
                        sz *= ts[i].dims[k];
                for (size_t k = 0; k < ts[j].labels.size(); ++k)
                    if (std::find(ts[i].labels.begin(), ts[i].labels.end(), ts[j].labels[k]) ==
                        ts[i].labels.end())
                        sz *= ts[j].dims[k];
                if (!found || sz < best_sz) {
                    best_sz = sz;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        if (!found) {  // outer product of the two smallest
            std::sort(ts.begin(), ts.end(),
                      [](const Tensor& x, const Tensor& y) { return x.size() < y.size(); });
            bi = 0;
            bj = 1;
        }
        Tensor merged = contract_pair(ts[bi], ts[bj]);
        std::vector<Tensor> nxt;
        for (size_t k = 0; k < ts.size(); ++k)
            if (k != bi && k != bj) nxt.push_back(std::move(ts[k]));
        nxt.push_back(std::move(merged));
        ts = std::move(nxt);
    }
    Tensor& res = ts[0];
    std::vector<int> order;
    for (const auto& l : open) {
        auto it = std::find(res.labels.begin(), res.labels.end(), l);
        if (it == res.labels.end()) throw std::runtime_error("tn: missing open label " + l);
        order.push_back(static_cast<int>(it - res.labels.begin()));
    }
    return permuted(res, order);
}

}  // namespace

Eigen::MatrixXd tn_plaquette_block(const LatticeGeometry& g, int lam, CGEngine& cg,
                                   SingletBasisCache& sb, int plaquette, const Pattern& pout,
                                   const Pattern& pin) {
    const Plaquette& pl = g.plaquettes.at(plaquette);
    const int nl = static_cast<int>(g.links.size());
    auto is_active = [&](int l) {
        return std::find(pl.links.begin(), pl.links.end(), l) != pl.links.end();
    };
    for (int l = 0; l < nl; ++l)
        if (!is_active(l) && pin[l] != pout[l]) return {};

    // bra/ket vertex singlet tensors; empty multiplicity kills the block
    std::vector<Tensor> ts;
    std::vector<std::string> open;
    std::vector<long> mo(g.num_vertices), mi(g.num_vertices);
    for (int pass = 0; pass < 2; ++pass) {
        const Pattern& p = pass == 0 ? pout : pin;
        const char tag = pass == 0 ? 'o' : 'i';
        for (int v = 0; v < g.num_vertices; ++v) {
            const Eigen::MatrixXd& basis = sb.basis(vertex_end_spec(g, p, v));
            if (basis.rows() == 0) return {};
            (pass == 0 ? mo : mi)[v] = basis.rows();
            Tensor t;
            t.labels.push_back(std::string("m") + tag + std::to_string(v));
            t.dims.push_back(basis.rows());
            for (const auto& e : g.vertex_ends[v]) {
                t.labels.push_back((e.is_head ? "b" : "a") + std::string(1, tag) +
                                   std::to_string(e.link));
                t.dims.push_back(dimension(p[e.link]));
            }
            t.data.assign(basis.size(), 0.0);
            for (long r = 0; r < basis.rows(); ++r)
                for (long cidx = 0; cidx < basis.cols(); ++cidx)
                    t.data[r * basis.cols() + cidx] = basis(r, cidx);
            ts.push_back(std::move(t));
        }
    }
    for (int v = 0; v < g.num_vertices; ++v) open.push_back("mo" + std::to_string(v));
    for (int v = 0; v < g.num_vertices; ++v) open.push_back("mi" + std::to_string(v));

    // active link operator tensors
    for (int k = 0; k < 4; ++k) {
        const int l = pl.links[k];
        const Irrep ri = pin[l], ro = pout[l];
        const long di = dimension(ri), dout = dimension(ro);
        Tensor t;
        t.labels = {"ao" + std::to_string(l), "bo" + std::to_string(l), "ai" + std::to_string(l),
                    "bi" + std::to_string(l), "t" + std::to_string(g.links[l].tail),
                    "t" + std::to_string(g.links[l].head)};
        t.dims = {dout, dout, di, di, 3, 3};
        t.data.assign(dout * dout * di * di * 9, 0.0);
        bool any = false;
        auto put = [&](long ao, long bo, long ai, long bi, int tt, int th, double amp) {
            t.data[((((ao * dout + bo) * di + ai) * di + bi) * 3 + tt) * 3 + th] += amp;
            any = true;
        };
        for (int tt = 0; tt < 3; ++tt)
            for (int th = 0; th < 3; ++th) {
                if (pl.forward[k]) {
                    const long d = dimension(ri);
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b)
                            for (const auto& el : apply_link_op(cg, tt, th, {ri, a, b}, lam))
                                if (el.out.irrep == ro)
                                    put(el.out.left, el.out.right, a, b, tt, th, el.amplitude);
                } else {
                    // adjoint: <out|U†|in> = <in|U|out>
                    const long d = dimension(ro);
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b)
                            for (const auto& el : apply_link_op(cg, tt, th, {ro, a, b}, lam))
                                if (el.out.irrep == ri)
                                    put(a, b, el.out.left, el.out.right, tt, th, el.amplitude);
                }
            }
        if (!any) return {};
        ts.push_back(std::move(t));
    }

    // spectator links: deltas between bra and ket end indices
    for (int l = 0; l < nl; ++l) {
        if (is_active(l)) continue;
        const long d = dimension(pin[l]);
        for (const char* side : {"a", "b"}) {
            Tensor t;
            t.labels = {side + std::string("o") + std::to_string(l),
                        side + std::string("i") + std::to_string(l)};
            t.dims = {d, d};
            t.data.assign(d * d, 0.0);
            for (long i = 0; i < d; ++i) t.data[i * d + i] = 1.0;
            ts.push_back(std::move(t));
        }
    }

    Tensor res = contract_all(std::move(ts), open);
    long rows = 1, cols = 1;
    for (int v = 0; v < g.num_vertices; ++v) rows *= mo[v];
    for (int v = 0; v < g.num_vertices; ++v) cols *= mi[v];
    Eigen::MatrixXd out(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) out(i, j) = res.data[i * cols + j];
    return out;
}

}  // namespace su3lgt

namespace su3lgt {

Eigen::MatrixXd tn_plaquette_matrix_physical(const LatticeGeometry& g, int lam, CGEngine& cg,
                                             SingletBasisCache& sb, const PhysicalBasis& phys,
                                             int plaquette) {
    Eigen::MatrixXd box = Eigen::MatrixXd::Zero(phys.size(), phys.size());
    const long npat = static_cast<long>(phys.patterns.size());
    for (long po = 0; po < npat; ++po)
        for (long pi = 0; pi < npat; ++pi) {
            const Eigen::MatrixXd blk = tn_plaquette_block(g, lam, cg, sb, plaquette,
                                                           phys.patterns[po], phys.patterns[pi]);
            if (blk.size() == 0) continue;
            const long fo = phys.first_state_of_pattern(po);
            const long fi = phys.first_state_of_pattern(pi);
            box.block(fo, fi, blk.rows(), blk.cols()) = blk;
        }
    return box + box.transpose();
}

}  // namespace su3lgt
