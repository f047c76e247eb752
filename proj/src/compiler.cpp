#include "su3lgt/compiler.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace su3lgt {

namespace {

std::string hexdouble(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

std::vector<int> find_control_links(const LatticeGeometry& g, int plaquette,
                                    std::vector<int>* vertices_out = nullptr) {
    const Plaquette& pl = g.plaquettes.at(plaquette);
    std::set<int> active(pl.links.begin(), pl.links.end());
    std::set<int> verts;
    for (int l : pl.links) {
        verts.insert(g.links[l].tail);
        verts.insert(g.links[l].head);
    }
    std::set<int> controls;
    for (int v : verts)
        for (const auto& e : g.vertex_ends[v])
            if (!active.count(e.link)) controls.insert(e.link);
    if (vertices_out) vertices_out->assign(verts.begin(), verts.end());
    return {controls.begin(), controls.end()};
}

// mod-3 balance at a plaquette vertex given active + control irreps
bool vertex_mod3(const LatticeGeometry& g, int v, const std::set<int>& active_set,
                 const std::map<int, Irrep>& assigned) {
    int t = 0;
    for (const auto& e : g.vertex_ends[v]) {
        auto it = assigned.find(e.link);
        if (it == assigned.end()) return true;  // incomplete; caller assigns all
        t += e.is_head ? triality(it->second) : -triality(it->second);
    }
    (void)active_set;
    return ((t % 3) + 3) % 3 == 0;
}

// Per-vertex factor matrix F[mult_out, mult_in]: bra and ket singlet tensors
// contracted with the two active-link end factors, summed over the vertex
// fundamental index, with spectator ends tied between bra and ket.
Eigen::MatrixXd vertex_factor(const LatticeGeometry& g, SingletBasisCache& sb, int v,
                              const Plaquette& pl, const std::map<int, Irrep>& out_ir,
                              const std::map<int, Irrep>& in_ir, CGEngine& cg, int lam) {
    const auto& ends = g.vertex_ends[v];
    const int ne = static_cast<int>(ends.size());
    const Irrep r3{1, 0};

    SingletBasisCache::EndSpec spec_out, spec_in;
    for (const auto& e : ends) {
        spec_out.emplace_back(out_ir.at(e.link), e.is_head);
        spec_in.emplace_back(in_ir.at(e.link), e.is_head);
    }
    const Eigen::MatrixXd& so = sb.basis(spec_out);
    const Eigen::MatrixXd& si = sb.basis(spec_in);
    if (so.rows() == 0 || si.rows() == 0) return {};

    std::set<int> active_set(pl.links.begin(), pl.links.end());
    std::vector<int> apos;
    for (int k = 0; k < ne; ++k)
        if (active_set.count(ends[k].link)) apos.push_back(k);
    if (apos.size() != 2) throw std::runtime_error("plaquette vertex without two active ends");

    // end factor tables f[io, ii, tau] per active end, from Eq.-(3) CG factors
    auto factor_table = [&](int k) {
        const int l = ends[k].link;
        const Irrep ri = in_ir.at(l), ro = out_ir.at(l);
        const bool fwd = pl.forward[std::find(pl.links.begin(), pl.links.end(), l) - pl.links.begin()];
        const long di = dimension(ri), dout = dimension(ro);
        std::vector<double> f(dout * di * 3, 0.0);
        if (fwd) {
            const CGTable& t = cg.table(ri, r3);
            const CGTable::Block* b = t.block(ro, 0);
            if (!b) return std::vector<double>();
            for (long ii = 0; ii < di; ++ii)
                for (int tau = 0; tau < 3; ++tau)
                    for (long io = 0; io < dout; ++io)
                        f[(io * di + ii) * 3 + tau] = b->coeff(ii * 3 + tau, io);
        } else {
            const CGTable& t = cg.table(ro, r3);
            const CGTable::Block* b = t.block(ri, 0);
            if (!b) return std::vector<double>();
            for (long io = 0; io < dout; ++io)
                for (int tau = 0; tau < 3; ++tau)
                    for (long ii = 0; ii < di; ++ii)
                        f[(io * di + ii) * 3 + tau] = b->coeff(io * 3 + tau, ii);
        }
        return f;
    };
    const auto f1 = factor_table(apos[0]);
    const auto f2 = factor_table(apos[1]);
    if (f1.empty() || f2.empty()) return {};
    const int l1 = ends[apos[0]].link, l2 = ends[apos[1]].link;
    const long do1 = dimension(out_ir.at(l1)), di1 = dimension(in_ir.at(l1));
    const long do2 = dimension(out_ir.at(l2)), di2 = dimension(in_ir.at(l2));

    // G[io1, io2, ii1, ii2] = sum_tau f1 f2
    std::vector<double> G(do1 * do2 * di1 * di2, 0.0);
    for (long io1 = 0; io1 < do1; ++io1)
        for (long ii1 = 0; ii1 < di1; ++ii1)
            for (long io2 = 0; io2 < do2; ++io2)
                for (long ii2 = 0; ii2 < di2; ++ii2) {
                    double s = 0.0;
                    for (int tau = 0; tau < 3; ++tau)
                        s += f1[(io1 * di1 + ii1) * 3 + tau] * f2[(io2 * di2 + ii2) * 3 + tau];
                    G[((io1 * do2 + io2) * di1 + ii1) * di2 + ii2] = s;
                }

    // group singlet entries by the spectator end indices
    std::vector<long> dims_out(ne), dims_in(ne);
    for (int k = 0; k < ne; ++k) {
        dims_out[k] = dimension(out_ir.at(ends[k].link));
        dims_in[k] = dimension(in_ir.at(ends[k].link));
    }
    struct Entry {
        long m, i1, i2;
        double c;
    };
    auto collect = [&](const Eigen::MatrixXd& basis, const std::vector<long>& dims) {
        std::map<std::vector<int>, std::vector<Entry>> groups;
        std::vector<int> idx(ne);
        for (long m = 0; m < basis.rows(); ++m)
            for (long flat = 0; flat < basis.cols(); ++flat) {
                const double c = basis(m, flat);
                if (std::abs(c) < 1e-15) continue;
                long x = flat;
                for (int k = ne - 1; k >= 0; --k) {
                    idx[k] = static_cast<int>(x % dims[k]);
                    x /= dims[k];
                }
                std::vector<int> spect;
                for (int k = 0; k < ne; ++k)
                    if (k != apos[0] && k != apos[1]) spect.push_back(idx[k]);
                groups[spect].push_back({m, idx[apos[0]], idx[apos[1]], c});
            }
        return groups;
    };
    const auto go = collect(so, dims_out);
    const auto gi = collect(si, dims_in);

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(so.rows(), si.rows());
    for (const auto& [spect, eo] : go) {
        auto it = gi.find(spect);
        if (it == gi.end()) continue;
        for (const auto& a : eo)
            for (const auto& b : it->second)
                f(a.m, b.m) +=
                    a.c * b.c * G[((a.i1 * do2 + a.i2) * di1 + b.i1) * di2 + b.i2];
    }
    return f;
}

}  // namespace

Eigen::MatrixXd SectorBlock::dense() const {
    const long n = static_cast<long>(configs.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j, v] : elements) {
        m(i, j) = v;
        m(j, i) = v;
    }
    return m;
}

const SectorBlock* CompiledPlaquette::sector_for(const std::vector<Irrep>& assignment) const {
    for (const auto& s : sectors)
        if (s.sector.assignment == assignment) return &s;
    return nullptr;
}

long CompiledPlaquette::total_rotations() const {
    long n = 0;
    for (const auto& s : sectors)
        if (s.merged_into < 0) n += static_cast<long>(s.program.size());
    return n;
}

std::vector<ControlSector> control_sector_assignments(const LatticeGeometry& g, int lam,
                                                      int plaquette) {
    std::vector<int> verts;
    const auto controls = find_control_links(g, plaquette, &verts);
    const Plaquette& pl = g.plaquettes.at(plaquette);
    const auto irreps = truncated_irreps(lam);
    std::vector<ControlSector> out;
    std::vector<Irrep> cur(controls.size());
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == controls.size()) {
            // keep if some active assignment passes mod-3 at every plaquette vertex
            std::map<int, Irrep> assigned;
            for (size_t i = 0; i < controls.size(); ++i) assigned[controls[i]] = cur[i];
            std::function<bool(size_t)> any = [&](size_t a) {
                if (a == pl.links.size()) {
                    for (int v : verts)
                        if (!vertex_mod3(g, v, {}, assigned)) return false;
                    return true;
                }
                for (const Irrep r : irreps) {
                    assigned[pl.links[a]] = r;
                    if (any(a + 1)) {
                        assigned.erase(pl.links[a]);
                        return true;
                    }
                }
                assigned.erase(pl.links[a]);
                return false;
            };
            out.push_back({cur, any(0)});
            return;
        }
        for (const Irrep r : irreps) {
            cur[k] = r;
            rec(k + 1);
        }
    };
    rec(0);
    return out;
}

CompiledPlaquette compile_plaquette(const LatticeGeometry& g, int lam, int plaquette,
                                    SingletBasisCache& sb) {
    CGEngine& cg = sb.engine();
    CompiledPlaquette out;
    out.plaquette = plaquette;
    out.lam = lam;
    out.convention = cg.convention_id();
    out.geometry = g.describe();
    out.control_links = find_control_links(g, plaquette, &out.plaq_vertices);
    const Plaquette& pl = g.plaquettes.at(plaquette);
    const auto irreps = truncated_irreps(lam);

    for (const auto& sector : control_sector_assignments(g, lam, plaquette)) {
        SectorBlock blk;
        blk.sector = sector;
        std::map<int, Irrep> controls;
        for (size_t i = 0; i < out.control_links.size(); ++i)
            controls[out.control_links[i]] = sector.assignment[i];

        // conduit flux: irrep content of the control-end product per vertex
        for (int v : out.plaq_vertices) {
            std::vector<Irrep> ends;
            for (const auto& e : g.vertex_ends[v]) {
                auto it = controls.find(e.link);
                if (it == controls.end()) continue;
                ends.push_back(e.is_head ? it->second : conjugate(it->second));
            }
            std::map<Irrep, int> content;
            content[{0, 0}] = 1;
            for (const Irrep r : ends) {
                std::map<Irrep, int> nxt;
                for (const auto& [a, m] : content)
                    for (const auto& [b, mm] : tensor_decompose(a, r).terms) nxt[b] += m * mm;
                content = std::move(nxt);
            }
            blk.conduit.emplace_back(content.begin(), content.end());
        }

        // enumerate valid active configs: mod-3 then nonzero singlet mult everywhere
        struct Cfg {
            std::array<Irrep, 4> active;
            std::vector<int> mult_dims;  // per plaquette vertex
        };
        std::vector<Cfg> cfgs;
        std::array<Irrep, 4> act{};
        std::function<void(int)> rec = [&](int k) {
            if (k == 4) {
                std::map<int, Irrep> assigned = controls;
                for (int i = 0; i < 4; ++i) assigned[pl.links[i]] = act[i];
                for (int v : out.plaq_vertices)
                    if (!vertex_mod3(g, v, {}, assigned)) return;
                std::vector<int> dims;
                for (int v : out.plaq_vertices) {
                    SingletBasisCache::EndSpec spec;
                    for (const auto& e : g.vertex_ends[v])
                        spec.emplace_back(assigned.at(e.link), e.is_head);
                    const int m = sb.multiplicity(spec);
                    if (m == 0) return;
                    dims.push_back(m);
                }
                cfgs.push_back({act, dims});
                return;
            }
            for (const Irrep r : irreps) {
                act[k] = r;
                rec(k + 1);
            }
        };
        rec(0);

        // flatten configs with mult labels
        for (const auto& c : cfgs) {
            long total = 1;
            for (int d : c.mult_dims) total *= d;
            for (long x = 0; x < total; ++x) {
                std::vector<int> m(c.mult_dims.size());
                long rem = x;
                for (int v = static_cast<int>(c.mult_dims.size()) - 1; v >= 0; --v) {
                    m[v] = static_cast<int>(rem % c.mult_dims[v]);
                    rem /= c.mult_dims[v];
                }
                blk.configs.push_back({c.active, m});
            }
        }
        std::map<ActiveConfig, long> cpos;
        for (long i = 0; i < static_cast<long>(blk.configs.size()); ++i)
            cpos[blk.configs[i]] = i;

        // box matrix elements between configs, vertex-factorized
        const long n = static_cast<long>(blk.configs.size());
        Eigen::MatrixXd box = Eigen::MatrixXd::Zero(n, n);
        for (const auto& ci : cfgs)
            for (const auto& co : cfgs) {
                // per-link prefactor and quick selection on decompositions
                double pref = 1.0;
                for (int k = 0; k < 4; ++k) {
                    const long di = dimension(ci.active[k]), dout = dimension(co.active[k]);
                    pref *= pl.forward[k] ? std::sqrt(double(di) / dout)
                                          : std::sqrt(double(dout) / di);
                }
                std::map<int, Irrep> in_ir = controls, out_ir = controls;
                for (int k = 0; k < 4; ++k) {
                    in_ir[pl.links[k]] = ci.active[k];
                    out_ir[pl.links[k]] = co.active[k];
                }
                std::vector<Eigen::MatrixXd> fs;
                bool dead = false;
                for (int v : out.plaq_vertices) {
                    Eigen::MatrixXd f = vertex_factor(g, sb, v, pl, out_ir, in_ir, cg, lam);
                    if (f.size() == 0 || f.cwiseAbs().maxCoeff() < 1e-300) {
                        dead = true;
                        break;
                    }
                    fs.push_back(std::move(f));
                }
                if (dead) continue;
                // assemble over vertex mult labels
                std::vector<int> mo(fs.size()), mi(fs.size());
                std::function<void(size_t, double)> emit = [&](size_t v, double val) {
                    if (v == fs.size()) {
                        const long i = cpos.at({co.active, mo});
                        const long j = cpos.at({ci.active, mi});
                        box(i, j) += pref * val;
                        return;
                    }
                    for (int a = 0; a < fs[v].rows(); ++a)
                        for (int b = 0; b < fs[v].cols(); ++b) {
                            if (fs[v](a, b) == 0.0) continue;
                            mo[v] = a;
                            mi[v] = b;
                            emit(v + 1, val * fs[v](a, b));
                        }
                };
                emit(0, pref == 0.0 ? 0.0 : 1.0);
            }

        const Eigen::MatrixXd herm = box + box.transpose();
        for (long i = 0; i < n; ++i)
            for (long j = i; j < n; ++j)
                if (std::abs(herm(i, j)) > 1e-13) {
                    if (i == j)
                        throw std::runtime_error("compiled plaquette has a diagonal element");
                    blk.elements.emplace_back(i, j, herm(i, j));
                }
        blk.program = givens_program(blk.elements);
        out.sectors.push_back(std::move(blk));
    }

    // merge sectors with identical blocks
    for (size_t i = 0; i < out.sectors.size(); ++i) {
        if (out.sectors[i].merged_into >= 0) continue;
        for (size_t j = i + 1; j < out.sectors.size(); ++j) {
            if (out.sectors[j].merged_into >= 0) continue;
            const auto& a = out.sectors[i];
            const auto& b = out.sectors[j];
            if (a.configs != b.configs || a.elements.size() != b.elements.size()) continue;
            bool same = true;
            for (size_t k = 0; k < a.elements.size() && same; ++k) {
                same = std::get<0>(a.elements[k]) == std::get<0>(b.elements[k]) &&
                       std::get<1>(a.elements[k]) == std::get<1>(b.elements[k]) &&
                       std::abs(std::get<2>(a.elements[k]) - std::get<2>(b.elements[k])) <= 1e-12;
            }
            if (same) out.sectors[j].merged_into = static_cast<int>(i);
        }
    }
    return out;
}

std::vector<GivensRotation> givens_program(
    const std::vector<std::tuple<long, long, double>>& elements) {
    std::vector<GivensRotation> prog;
    for (const auto& [i, j, v] : elements) prog.push_back({i, j, v});
    std::sort(prog.begin(), prog.end(), [](const GivensRotation& a, const GivensRotation& b) {
        const double ma = std::abs(a.coeff), mb = std::abs(b.coeff);
        if (ma != mb) return ma > mb;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    return prog;
}

std::vector<RotationScanRow> rotation_count_scan(const LatticeGeometry& g, int plaquette,
                                                 int lam_min, int lam_max, SingletBasisCache& sb) {
    std::vector<RotationScanRow> rows;
    for (int lam = lam_min; lam <= lam_max; ++lam) {
        const auto c = compile_plaquette(g, lam, plaquette, sb);
        long rot = 0;
        for (const auto& s : c.sectors)
            if (s.merged_into < 0) rot += static_cast<long>(s.program.size());
        rows.push_back({lam, static_cast<long>(c.sectors.size()), rot});
    }
    return rows;
}

void save_compiled(const CompiledPlaquette& c, const std::filesystem::path& file,
                   const std::string& config_hash) {
    std::ostringstream body;
    body << "su3lgt-compiled v1\n";
    body << "convention " << c.convention << "\n";
    if (!config_hash.empty()) body << "confighash " << config_hash << "\n";
    body << "geometry " << c.geometry << "\n";
    body << "lambda " << c.lam << "\n";
    body << "plaquette " << c.plaquette << "\n";
    body << "controls " << c.control_links.size();
    for (int l : c.control_links) body << " " << l;
    body << "\n";
    body << "plaqvertices";
    for (int v : c.plaq_vertices) body << " " << v;
    body << "\n";
    body << "sectors " << c.sectors.size() << "\n";
    uint64_t h = fnv1a64("su3lgt-compiled", 15);
    for (size_t si = 0; si < c.sectors.size(); ++si) {
        const auto& s = c.sectors[si];
        std::ostringstream sec;
        sec << "sector " << si << "\n";
        sec << "assignment";
        for (const Irrep r : s.sector.assignment) sec << " " << r.p << " " << r.q;
        sec << "\n";
        sec << "mergedinto " << s.merged_into << "\n";
        for (size_t v = 0; v < s.conduit.size(); ++v) {
            sec << "conduit " << c.plaq_vertices[v] << " " << s.conduit[v].size();
            for (const auto& [r, m] : s.conduit[v]) sec << " " << r.p << " " << r.q << " " << m;
            sec << "\n";
        }
        sec << "configs " << s.configs.size() << "\n";
        for (const auto& cf : s.configs) {
            sec << "config";
            for (const Irrep r : cf.active) sec << " " << r.p << " " << r.q;
            sec << " m";
            for (int m : cf.mults) sec << " " << m;
            sec << "\n";
        }
        sec << "elements " << s.elements.size() << "\n";
        for (const auto& [i, j, v] : s.elements) sec << i << " " << j << " " << hexdouble(v) << "\n";
        sec << "givens " << s.program.size() << "\n";
        for (const auto& r : s.program) sec << r.i << " " << r.j << " " << hexdouble(r.coeff) << "\n";
        sec << "endsector\n";
        const std::string st = sec.str();
        h = fnv1a64(st, h);
        body << st;
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, h);
    body << "checksum " << hex << "\n";
    std::ofstream outf(file, std::ios::binary | std::ios::trunc);
    outf << body.str();
    if (!outf) throw std::runtime_error("failed to write " + file.string());
}

CompiledPlaquette load_compiled(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    auto next = [&]() {
        if (!std::getline(in, line)) throw std::runtime_error("truncated compiled file");
        return std::istringstream(line);
    };
    CompiledPlaquette c;
    {
        auto is = next();
        std::string magic, ver;
        is >> magic >> ver;
        if (magic != "su3lgt-compiled" || ver != "v1")
            throw std::runtime_error("bad compiled-operator header");
    }
    std::string word;
    long nsectors = 0;
    while (std::getline(in, line)) {
        std::istringstream is(line);
        is >> word;
        if (word == "convention") is >> c.convention;
        else if (word == "confighash") { std::string t; is >> t; }
        else if (word == "geometry") c.geometry = line.substr(9);
        else if (word == "lambda") is >> c.lam;
        else if (word == "plaquette") is >> c.plaquette;
        else if (word == "controls") {
            size_t n; is >> n;
            c.control_links.resize(n);
            for (auto& l : c.control_links) is >> l;
        } else if (word == "plaqvertices") {
            int v;
            while (is >> v) c.plaq_vertices.push_back(v);
        } else if (word == "sectors") {
            is >> nsectors;
            break;
        }
    }
    for (long si = 0; si < nsectors; ++si) {
        SectorBlock s;
        { auto is = next(); is >> word; long idx; is >> idx; }
        {
            auto is = next();
            is >> word;
            Irrep r;
            while (is >> r.p >> r.q) s.sector.assignment.push_back(r);
        }
        { auto is = next(); is >> word >> s.merged_into; }
        for (size_t v = 0; v < c.plaq_vertices.size(); ++v) {
            auto is = next();
            int vid; size_t n;
            is >> word >> vid >> n;
            std::vector<std::pair<Irrep, int>> cont(n);
            for (auto& [r, m] : cont) is >> r.p >> r.q >> m;
            s.conduit.push_back(std::move(cont));
        }
        size_t ncfg = 0;
        { auto is = next(); is >> word >> ncfg; }
        for (size_t k = 0; k < ncfg; ++k) {
            auto is = next();
            ActiveConfig cf;
            is >> word;
            for (auto& r : cf.active) is >> r.p >> r.q;
            is >> word;  // "m"
            int m;
            while (is >> m) cf.mults.push_back(m);
            s.configs.push_back(std::move(cf));
        }
        size_t nel = 0;
        { auto is = next(); is >> word >> nel; }
        for (size_t k = 0; k < nel; ++k) {
            auto is = next();
            long i, j;
            std::string hx;
            is >> i >> j >> hx;
            s.elements.emplace_back(i, j, std::strtod(hx.c_str(), nullptr));
        }
        size_t ng = 0;
        { auto is = next(); is >> word >> ng; }
        for (size_t k = 0; k < ng; ++k) {
            auto is = next();
            GivensRotation r;
            std::string hx;
            is >> r.i >> r.j >> hx;
            r.coeff = std::strtod(hx.c_str(), nullptr);
            s.program.push_back(r);
        }
        { auto is = next(); is >> word; if (word != "endsector") throw std::runtime_error("compiled file: endsector expected"); }
        c.sectors.push_back(std::move(s));
    }
    return c;
}

}  // namespace su3lgt

namespace su3lgt {

Eigen::MatrixXd compiled_plaquette_matrix_physical(const LatticeGeometry& g,
                                                   const PhysicalBasis& phys,
                                                   const CompiledPlaquette& cp) {
    const Plaquette& pl = g.plaquettes.at(cp.plaquette);
    std::set<int> active(pl.links.begin(), pl.links.end());
    std::vector<int> spect_links;
    for (int l = 0; l < static_cast<int>(g.links.size()); ++l)
        if (!active.count(l)) spect_links.push_back(l);
    std::vector<int> far_vertices;
    for (int v = 0; v < g.num_vertices; ++v)
        if (!std::binary_search(cp.plaq_vertices.begin(), cp.plaq_vertices.end(), v))
            far_vertices.push_back(v);

    using Key = std::vector<int>;
    std::map<Key, std::map<ActiveConfig, long>> groups;
    std::vector<Key> keys(phys.size());
    for (long i = 0; i < phys.size(); ++i) {
        const auto& st = phys.states[i];
        Key key;
        for (int l : spect_links) key.push_back(st.pattern[l].p * 1024 + st.pattern[l].q);
        for (int v : far_vertices) key.push_back(st.mults[v]);
        keys[i] = key;
        ActiveConfig cf;
        for (int k = 0; k < 4; ++k) cf.active[k] = st.pattern[pl.links[k]];
        for (int v : cp.plaq_vertices) cf.mults.push_back(st.mults[v]);
        groups[key][cf] = i;
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(phys.size(), phys.size());
    for (const auto& [key, cfmap] : groups) {
        std::vector<Irrep> assignment;
        for (int cl : cp.control_links) {
            const auto it = std::find(spect_links.begin(), spect_links.end(), cl);
            const int enc = key[it - spect_links.begin()];
            assignment.push_back({enc / 1024, enc % 1024});
        }
        const SectorBlock* sec = cp.sector_for(assignment);
        if (!sec) continue;
        const SectorBlock& blk = sec->merged_into >= 0 ? cp.sectors[sec->merged_into] : *sec;
        std::map<ActiveConfig, long> cpos;
        for (long c = 0; c < static_cast<long>(blk.configs.size()); ++c)
            cpos[blk.configs[c]] = c;
        const Eigen::MatrixXd dense = blk.dense();
        for (const auto& [cfi, gi] : cfmap) {
            auto it_i = cpos.find(cfi);
            if (it_i == cpos.end()) continue;
            for (const auto& [cfj, gj] : cfmap) {
                auto it_j = cpos.find(cfj);
                if (it_j == cpos.end()) continue;
                h(gi, gj) += dense(it_i->second, it_j->second);
            }
        }
    }
    return h;
}

}  // namespace su3lgt
