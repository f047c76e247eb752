#include "su3lgt/evolve.hpp"

#include <fstream>
#include <numeric>
#include <set>

namespace su3lgt {

CompiledSet compile_all(const LatticeGeometry& g, int lam, SingletBasisCache& sb) {
    CompiledSet out;
    for (int p = 0; p < static_cast<int>(g.plaquettes.size()); ++p)
        out.per_plaquette.push_back(compile_plaquette(g, lam, p, sb));
    return out;
}

PatternSpace make_pattern_space(const LatticeGeometry& g, int lam, SingletBasisCache& sb,
                                bool mod3_only) {
    PatternSpace s;
    s.geom = g;
    s.lam = lam;
    s.indexer = PatternIndexer(static_cast<int>(g.links.size()), lam);
    if (mod3_only) {
        s.patterns = enumerate_reduced_basis(g, lam);
    } else {
        for (uint64_t i = 0; i < s.indexer.size(); ++i) s.patterns.push_back(s.indexer.pattern(i));
    }
    for (long i = 0; i < s.size(); ++i) s.pos[s.indexer.index(s.patterns[i])] = i;
    s.mod3_ok.resize(s.size());
    s.gauge_ok.resize(s.size());
    for (long i = 0; i < s.size(); ++i) {
        const Pattern& p = s.patterns[i];
        s.mod3_ok[i] = mod3_valid(g, p) ? 1 : 0;
        bool gi = s.mod3_ok[i] != 0;
        for (int v = 0; v < g.num_vertices && gi; ++v)
            gi = sb.multiplicity(vertex_end_spec(g, p, v)) > 0;
        s.gauge_ok[i] = gi ? 1 : 0;
    }
    return s;
}

namespace {

// plaquettes in checkerboard order: even sublattice first
std::vector<int> checkerboard_order(const LatticeGeometry& g) {
    std::vector<int> order;
    const long np = static_cast<long>(g.plaquettes.size());
    auto color = [&](long p) {
        if (g.dim == 2) {
            const int ny = g.extents[1];
            return static_cast<int>((p / ny + p % ny) % 2);
        }
        return static_cast<int>(p % 2);
    };
    for (long p = 0; p < np; ++p)
        if (color(p) == 0) order.push_back(static_cast<int>(p));
    for (long p = 0; p < np; ++p)
        if (color(p) == 1) order.push_back(static_cast<int>(p));
    return order;
}

}  // namespace

TrotterPlan make_trotter_plan(const PatternSpace& space, const CompiledSet& ops,
                              const CouplingParams& params) {
    TrotterPlan plan;
    plan.params = params;
    plan.dim = space.size();
    plan.electric.resize(space.size());
    for (long i = 0; i < space.size(); ++i) {
        double e = 0.0;
        for (const Irrep r : space.patterns[i]) e += boost::rational_cast<double>(casimir2(r));
        plan.electric(i) = e;
    }

    const LatticeGeometry& g = space.geom;
    for (int pi : checkerboard_order(g)) {
        const CompiledPlaquette& cp = ops.per_plaquette.at(pi);
        const Plaquette& pl = g.plaquettes[pi];
        // group basis states by spectator content and control assignment
        // spectator key: irreps on all non-active links
        std::vector<int> spect_links;
        std::set<int> active(pl.links.begin(), pl.links.end());
        for (int l = 0; l < static_cast<int>(g.links.size()); ++l)
            if (!active.count(l)) spect_links.push_back(l);

        std::map<std::vector<int>, std::map<std::array<Irrep, 4>, long>> groups;
        for (long i = 0; i < space.size(); ++i) {
            const Pattern& p = space.patterns[i];
            std::vector<int> key;
            for (int l : spect_links) key.push_back(p[l].p * 1024 + p[l].q);
            std::array<Irrep, 4> act{};
            for (int k = 0; k < 4; ++k) act[k] = p[pl.links[k]];
            groups[key][act] = i;
        }
        // resolve each sector's rotations against each spectator group
        for (const auto& sec : cp.sectors) {
            const SectorBlock& blk =
                sec.merged_into >= 0 ? cp.sectors[sec.merged_into] : sec;
            if (blk.program.empty()) continue;
            // the pattern space cannot carry multiplicity labels
            for (const auto& cf : blk.configs)
                for (int m : cf.mults)
                    if (m != 0)
                        throw std::runtime_error(
                            "pattern-basis magnetic term needs multiplicity-free vertices; "
                            "use the physical basis");
            std::vector<std::vector<std::pair<long, long>>> pair_lists(blk.program.size());
            for (const auto& [key, actmap] : groups) {
                // controls must match the sector assignment
                bool match = true;
                std::map<int, Irrep> spect;
                for (size_t k = 0; k < spect_links.size(); ++k)
                    spect[spect_links[k]] = {key[k] / 1024, key[k] % 1024};
                for (size_t k = 0; k < cp.control_links.size() && match; ++k)
                    match = spect.at(cp.control_links[k]) == sec.sector.assignment[k];
                if (!match) continue;
                for (size_t r = 0; r < blk.program.size(); ++r) {
                    const auto& rot = blk.program[r];
                    auto it_i = actmap.find(blk.configs[rot.i].active);
                    auto it_j = actmap.find(blk.configs[rot.j].active);
                    if (it_i == actmap.end() || it_j == actmap.end()) continue;
                    pair_lists[r].emplace_back(it_i->second, it_j->second);
                }
            }
            for (size_t r = 0; r < blk.program.size(); ++r)
                if (!pair_lists[r].empty())
                    plan.rotations.push_back(
                        {std::move(pair_lists[r]),
                         -params.magnetic_prefactor() * blk.program[r].coeff, pi});
        }
    }
    return plan;
}

TrotterPlan make_trotter_plan_physical(const LatticeGeometry& g, int lam,
                                       const PhysicalBasis& phys, const CompiledSet& ops,
                                       const CouplingParams& params) {
    TrotterPlan plan;
    plan.params = params;
    plan.dim = phys.size();
    plan.electric.resize(phys.size());
    for (long i = 0; i < phys.size(); ++i) {
        double e = 0.0;
        for (const Irrep r : phys.states[i].pattern) e += boost::rational_cast<double>(casimir2(r));
        plan.electric(i) = e;
    }
    for (int pi : checkerboard_order(g)) {
        const CompiledPlaquette& cp = ops.per_plaquette.at(pi);
        const Plaquette& pl = g.plaquettes[pi];
        std::set<int> active(pl.links.begin(), pl.links.end());
        std::vector<int> spect_links;
        for (int l = 0; l < static_cast<int>(g.links.size()); ++l)
            if (!active.count(l)) spect_links.push_back(l);
        std::vector<int> far_vertices;
        for (int v = 0; v < g.num_vertices; ++v)
            if (!std::binary_search(cp.plaq_vertices.begin(), cp.plaq_vertices.end(), v))
                far_vertices.push_back(v);

        // group physical states by (spectator irreps, far-vertex mults)
        using Key = std::vector<int>;
        std::map<Key, std::map<ActiveConfig, long>> groups;
        for (long i = 0; i < phys.size(); ++i) {
            const auto& st = phys.states[i];
            Key key;
            for (int l : spect_links) key.push_back(st.pattern[l].p * 1024 + st.pattern[l].q);
            for (int v : far_vertices) key.push_back(st.mults[v]);
            ActiveConfig cf;
            for (int k = 0; k < 4; ++k) cf.active[k] = st.pattern[pl.links[k]];
            for (int v : cp.plaq_vertices) cf.mults.push_back(st.mults[v]);
            groups[key][cf] = i;
        }
        for (const auto& sec : cp.sectors) {
            const SectorBlock& blk = sec.merged_into >= 0 ? cp.sectors[sec.merged_into] : sec;
            if (blk.program.empty()) continue;
            std::vector<std::vector<std::pair<long, long>>> pair_lists(blk.program.size());
            for (const auto& [key, cfmap] : groups) {
                bool match = true;
                for (size_t k = 0; k < cp.control_links.size() && match; ++k) {
                    // control links are spectators; find their position
                    const auto it = std::find(spect_links.begin(), spect_links.end(),
                                              cp.control_links[k]);
                    const int enc = key[it - spect_links.begin()];
                    match = Irrep{enc / 1024, enc % 1024} == sec.sector.assignment[k];
                }
                if (!match) continue;
                for (size_t r = 0; r < blk.program.size(); ++r) {
                    const auto& rot = blk.program[r];
                    auto it_i = cfmap.find(blk.configs[rot.i]);
                    auto it_j = cfmap.find(blk.configs[rot.j]);
                    if (it_i == cfmap.end() || it_j == cfmap.end()) continue;
                    pair_lists[r].emplace_back(it_i->second, it_j->second);
                }
            }
            for (size_t r = 0; r < blk.program.size(); ++r)
                if (!pair_lists[r].empty())
                    plan.rotations.push_back(
                        {std::move(pair_lists[r]),
                         -params.magnetic_prefactor() * blk.program[r].coeff, pi});
        }
    }
    return plan;
}

Eigen::MatrixXd TrotterPlan::dense_hamiltonian() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) h(i, i) = params.electric_prefactor() * electric(i);
    for (const auto& r : rotations)
        for (const auto& [i, j] : r.pairs) {
            h(i, j) += r.hcoeff;
            h(j, i) += r.hcoeff;
        }
    return h;
}

Eigen::SparseMatrix<double> TrotterPlan::sparse_hamiltonian() const {
    std::vector<Eigen::Triplet<double>> trips;
    for (long i = 0; i < dim; ++i)
        trips.emplace_back(i, i, params.electric_prefactor() * electric(i));
    for (const auto& r : rotations)
        for (const auto& [i, j] : r.pairs) {
            trips.emplace_back(i, j, r.hcoeff);
            trips.emplace_back(j, i, r.hcoeff);
        }
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

namespace {

void apply_phase(const TrotterPlan& plan, VectorXcd& psi, double dt) {
    const double pref = plan.params.electric_prefactor();
    for (long i = 0; i < plan.dim; ++i)
        psi(i) *= std::polar(1.0, -dt * pref * plan.electric(i));
}

void apply_rotation(const LiftedRotation& r, VectorXcd& psi, double dt) {
    const double theta = dt * r.hcoeff;
    const double c = std::cos(theta);
    const Cx s(0.0, -std::sin(theta));
    for (const auto& [i, j] : r.pairs) {
        const Cx a = psi(i), b = psi(j);
        psi(i) = c * a + s * b;
        psi(j) = s * a + c * b;
    }
}

}  // namespace

void trotter_step(const TrotterPlan& plan, VectorXcd& psi, double dt, int order) {
    if (order == 1) {
        apply_phase(plan, psi, dt);
        for (const auto& r : plan.rotations) apply_rotation(r, psi, dt);
    } else if (order == 2) {
        apply_phase(plan, psi, dt / 2);
        for (const auto& r : plan.rotations) apply_rotation(r, psi, dt / 2);
        for (auto it = plan.rotations.rbegin(); it != plan.rotations.rend(); ++it)
            apply_rotation(*it, psi, dt / 2);
        apply_phase(plan, psi, dt / 2);
    } else {
        throw std::invalid_argument("trotter order must be 1 or 2");
    }
}

VectorXcd evolve_exact_dense(const Eigen::MatrixXd& h, const VectorXcd& psi0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();
    VectorXcd y = v.transpose() * psi0;
    for (long k = 0; k < y.size(); ++k) y(k) *= std::polar(1.0, -lam(k) * t);
    return v * y;
}

VectorXcd evolve_krylov(const Eigen::SparseMatrix<double>& h, const VectorXcd& psi0, double t,
                        int subspace_dim, double step_tol) {
    // Lanczos with full reorthogonalization; time sub-stepping when the
    // residual estimate exceeds step_tol.
    const long n = psi0.size();
    const int m = static_cast<int>(std::min<long>(subspace_dim, n));
    VectorXcd psi = psi0;
    double remaining = t;
    const double sign = t >= 0 ? 1.0 : -1.0;
    remaining = std::abs(t);
    int guard = 0;
    while (remaining > 0 && guard++ < 10000) {
        std::vector<VectorXcd> v;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        const double nrm = psi.norm();
        if (nrm == 0) return psi;
        v.push_back(psi / nrm);
        int built = 0;
        for (int k = 0; k < m; ++k) {
            VectorXcd w = h * v[k];
            const double alpha = std::real(v[k].dot(w));
            tri(k, k) = alpha;
            w -= alpha * v[k];
            if (k > 0) w -= tri(k, k - 1) * v[k - 1];
            for (const auto& u : v) w -= u.dot(w) * u;  // full reorthogonalization
            built = k + 1;
            const double beta = w.norm();
            if (k + 1 < m) {
                if (beta < 1e-14) break;
                tri(k, k + 1) = beta;
                tri(k + 1, k) = beta;
                v.push_back(w / beta);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri.topLeftCorner(built, built));
        // choose step: error heuristic from the last subspace component
        double dt = remaining;
        for (int half = 0; half < 60; ++half) {
            Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(built);
            e1(0) = nrm;
            Eigen::VectorXcd y = es.eigenvectors().transpose().cast<Cx>() * e1;
            for (int k = 0; k < built; ++k)
                y(k) *= std::polar(1.0, -sign * es.eigenvalues()(k) * dt);
            y = es.eigenvectors().cast<Cx>() * y;
            const double tail = built == static_cast<int>(v.size())
                                    ? std::abs(y(built - 1))
                                    : 0.0;
            if (built < m || tail < step_tol * std::max(1.0, nrm) || dt < 1e-12) {
                VectorXcd out = VectorXcd::Zero(n);
                for (int k = 0; k < built; ++k) out += y(k) * v[k];
                psi = out;
                remaining -= dt;
                break;
            }
            dt /= 2;
        }
    }
    return psi;
}

VectorXcd evolve_exact(const Eigen::SparseMatrix<double>& h, const VectorXcd& psi0, double t,
                       long dense_limit) {
    if (h.rows() <= dense_limit) return evolve_exact_dense(Eigen::MatrixXd(h), psi0, t);
    return evolve_krylov(h, psi0, t);
}

ObservableRecord measure_observables(const PatternSpace& space, const TrotterPlan& plan,
                                     const VectorXcd& psi, double time) {
    ObservableRecord r;
    r.time = time;
    r.norm = psi.norm();
    for (long i = 0; i < space.size(); ++i) {
        const double w = std::norm(psi(i));
        r.electric += w * plan.electric(i);
        if (!space.mod3_ok[i]) r.mod3_violation += w;
        if (!space.gauge_ok[i]) r.gauge_violation += w;
    }
    // magnetic expectation per plaquette from the lifted rotations is not
    // plaquette-resolved here; recompute from pair structure
    r.plaquette_expectation.assign(space.geom.plaquettes.size(), 0.0);
    double mag = 0.0;
    for (const auto& rot : plan.rotations) {
        double contrib = 0.0;
        for (const auto& [i, j] : rot.pairs) contrib += 2.0 * std::real(std::conj(psi(i)) * psi(j));
        const double val = (-rot.hcoeff / plan.params.magnetic_prefactor()) * contrib;
        r.plaquette_expectation[rot.plaquette] += val;
        mag += val;
    }
    r.magnetic = mag;
    r.energy = plan.params.electric_prefactor() * r.electric -
               plan.params.magnetic_prefactor() * r.magnetic;
    const int nirr = (space.lam + 1) * (space.lam + 1);
    r.link_irrep_probs.assign(space.geom.links.size(), std::vector<double>(nirr, 0.0));
    for (long i = 0; i < space.size(); ++i) {
        const double w = std::norm(psi(i));
        if (w == 0) continue;
        for (size_t l = 0; l < space.patterns[i].size(); ++l) {
            const Irrep rr = space.patterns[i][l];
            r.link_irrep_probs[l][rr.p * (space.lam + 1) + rr.q] += w;
        }
    }
    return r;
}

EvolutionTrace evolve_trotter(const PatternSpace& space, const TrotterPlan& plan,
                              const VectorXcd& psi0, double t, int n_steps, int order) {
    EvolutionTrace trace;
    VectorXcd psi = psi0;
    trace.records.push_back(measure_observables(space, plan, psi, 0.0));
    const double dt = n_steps > 0 ? t / n_steps : 0.0;
    for (int k = 0; k < n_steps; ++k) {
        trotter_step(plan, psi, dt, order);
        trace.records.push_back(measure_observables(space, plan, psi, dt * (k + 1)));
    }
    return trace;
}

void EvolutionTrace::write_csv(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::trunc);
    out << "step,time,norm,electric,magnetic,energy,mod3_violation,gauge_violation\n";
    out.precision(17);
    for (size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        out << k << "," << r.time << "," << r.norm << "," << r.electric << "," << r.magnetic
            << "," << r.energy << "," << r.mod3_violation << "," << r.gauge_violation << "\n";
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace su3lgt
