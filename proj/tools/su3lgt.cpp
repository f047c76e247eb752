// su3lgt: build truncated SU(3) Kogut-Susskind bases, compile plaquette
// operators into controlled Givens programs, and run verification evolutions.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "su3lgt/config.hpp"
#include "su3lgt/evolve.hpp"
#include "su3lgt/noise.hpp"

using namespace su3lgt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitCap = 3;

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> overrides;  // key=value
};

RunConfig resolve_config(const CommonOpts& c) {
    RunConfig cfg = c.config_file.empty() ? RunConfig{} : RunConfig::parse_file(c.config_file);
    for (const auto& ov : c.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must look like key=value: " + ov);
        cfg.apply(ov.substr(0, eq), ov.substr(eq + 1));
    }
    cfg.validate();
    if (cfg.raw.empty()) cfg.raw = cfg.normalized();
    return cfg;
}

void add_common(CLI::App* app, CommonOpts& c) {
    app->add_option("--config", c.config_file, "configuration file (key = value)");
    app->add_option("--set", c.overrides, "override a config key, e.g. --set lambda=2")
        ->take_all();
}

void write_provenance(std::ostream& os, const RunConfig& cfg, const std::string& convention) {
    os << "# config-hash " << cfg.hash_hex() << "\n";
    os << "# convention " << convention << "\n";
    os << "# --- config ---\n";
    std::istringstream raw(cfg.raw);
    std::string line;
    while (std::getline(raw, line)) os << "# " << line << "\n";
    os << "# --- end config ---\n";
}

int cmd_resources(const RunConfig& cfg) {
    const auto geom = cfg.geometry();
    std::filesystem::create_directories(cfg.output);
    std::ofstream out(cfg.output / "resources.txt");
    CGEngine cg;
    write_provenance(out, cfg, cg.convention_id());
    for (int lam = 1; lam <= std::max(1, cfg.lambda); ++lam) {
        const auto r = qubit_count(lam, static_cast<long>(geom.links.size()));
        out << "lambda " << lam << ": irrep-qubits " << r.irrep_qubits << " local-qubits "
            << r.local_qubits << " per-link " << r.qubits_per_link << " register-dims "
            << r.register_dims[0] << " " << r.register_dims[1] << " " << r.register_dims[2]
            << " total " << r.total_qubits << "\n";
    }
    out.close();
    std::cout << "wrote " << (cfg.output / "resources.txt").string() << "\n";
    return kExitOk;
}

int cmd_build_basis(const RunConfig& cfg) {
    const auto geom = cfg.geometry();
    CGEngine cg;
    SingletBasisCache sb(cg);
    std::filesystem::create_directories(cfg.output);
    std::ofstream out(cfg.output / "basis_summary.txt");
    write_provenance(out, cfg, cg.convention_id());
    out << "geometry " << geom.describe() << "\n";
    const LinkBasis lb(cfg.lambda);
    out << "per-link full dimension " << lb.size() << "\n";
    const PatternIndexer ix(static_cast<int>(geom.links.size()), cfg.lambda);
    out << "pattern space " << ix.size() << "\n";
    const auto reduced = enumerate_reduced_basis(geom, cfg.lambda);
    out << "reduced (mod-3) basis " << reduced.size() << "\n";
    const auto phys = enumerate_physical_basis(geom, cfg.lambda, sb);
    out << "gauge-invariant basis " << phys.size() << " (patterns " << phys.patterns.size()
        << ")\n";
    if (cfg.lambda >= 1) {
        const auto r = qubit_count(cfg.lambda, static_cast<long>(geom.links.size()));
        out << "qubits per link " << r.qubits_per_link << " (irrep " << r.irrep_qubits
            << " + local " << r.local_qubits << ")\n";
        out << "register dims [T]=" << r.register_dims[0] << " [Tz]=" << r.register_dims[1]
            << " [Y]=" << r.register_dims[2] << "\n";
        out << "lattice total qubits " << r.total_qubits << "\n";
    } else {
        out << "qubits per link 0 (lambda 0: every size is 1)\n";
    }
    out.close();
    std::cout << "wrote " << (cfg.output / "basis_summary.txt").string() << "\n";
    return kExitOk;
}

int cmd_compile(const RunConfig& cfg, int scan_max) {
    const auto geom = cfg.geometry();
    CGEngine cg;
    SingletBasisCache sb(cg);
    std::filesystem::create_directories(cfg.output);
    for (int p = 0; p < static_cast<int>(geom.plaquettes.size()); ++p) {
        const auto compiled = compile_plaquette(geom, cfg.lambda, p, sb);
        std::ostringstream name;
        name << "compiled_p" << p << ".cgop";
        save_compiled(compiled, cfg.output / name.str(), cfg.hash_hex());
        std::cout << "plaquette " << p << ": sectors " << compiled.sectors.size()
                  << " rotations " << compiled.total_rotations() << "\n";
    }
    if (scan_max >= 0) {
        std::ofstream out(cfg.output / "rotation_scan.txt");
        write_provenance(out, cfg, cg.convention_id());
        out << "lambda sectors rotations\n";
        for (const auto& row : rotation_count_scan(geom, 0, 0, scan_max, sb))
            out << row.lam << " " << row.sectors << " " << row.rotations << "\n";
    }
    std::cout << "wrote compiled operators to " << cfg.output.string() << "\n";
    return kExitOk;
}

int cmd_evolve(const RunConfig& cfg) {
    const auto geom = cfg.geometry();
    CGEngine cg;
    SingletBasisCache sb(cg);
    std::filesystem::create_directories(cfg.output);
    CouplingParams params{cfg.g, cfg.a, geom.dim == 2 ? 2 : 1};

    json summary;
    summary["config_hash"] = cfg.hash_hex();
    summary["convention"] = cg.convention_id();
    summary["config"] = cfg.raw;
    summary["geometry"] = geom.describe();

    const bool noisy = cfg.error_p > 0.0 || !cfg.p_scan.empty();
    const double pattern_count =
        std::pow(double((cfg.lambda + 1) * (cfg.lambda + 1)), double(geom.links.size()));
    if (noisy && pattern_count > double(1ULL << 22))
        throw CapExceeded("pattern space too large for the noise model");

    const auto ops = compile_all(geom, cfg.lambda, sb);

    // geometries whose invariant patterns carry vertex multiplicity need the
    // (pattern, multiplicity) basis; bare patterns suffice otherwise
    const auto phys = enumerate_physical_basis(geom, cfg.lambda, sb);
    bool mult_free = true;
    for (const auto& dims : phys.mult_dims)
        for (int d : dims)
            if (d > 1) mult_free = false;
    if (!mult_free) {
        if (noisy) throw CapExceeded("noise model needs multiplicity-free patterns");
        const auto plan = make_trotter_plan_physical(geom, cfg.lambda, phys, ops, params);
        VectorXcd psi = VectorXcd::Zero(phys.size());
        psi(0) = 1.0;  // all-singlet state comes first
        std::ofstream csv(cfg.output / "trace.csv");
        csv << "step,time,norm,electric,energy\n";
        csv.precision(17);
        const double dt = cfg.steps > 0 ? cfg.t / cfg.steps : 0.0;
        double max_dev = 0.0;
        for (int k = 0; k <= cfg.steps; ++k) {
            double e = 0.0;
            for (long i = 0; i < phys.size(); ++i) e += std::norm(psi(i)) * plan.electric(i);
            csv << k << "," << k * dt << "," << psi.norm() << "," << e << ","
                << params.electric_prefactor() * e << "\n";
            max_dev = std::max(max_dev, std::abs(psi.norm() - 1.0));
            if (k < cfg.steps) trotter_step(plan, psi, dt, cfg.order);
        }
        summary["basis"] = "physical";
        summary["dimension"] = phys.size();
        summary["max_gauge_violation"] = 0.0;
        summary["max_norm_deviation"] = max_dev;
        std::ofstream js(cfg.output / "summary.json");
        js << summary.dump(2) << "\n";
        std::cout << "wrote " << (cfg.output / "trace.csv").string() << " and summary.json\n";
        return kExitOk;
    }

    const PatternIndexer pix(static_cast<int>(geom.links.size()), cfg.lambda);
    PatternSpace space = make_pattern_space(geom, cfg.lambda, sb, /*mod3_only=*/!noisy);
    TrotterPlan plan = make_trotter_plan(space, ops, params);
    VectorXcd psi0 = VectorXcd::Zero(space.size());
    psi0(space.pos.at(pix.index(Pattern(geom.links.size(), Irrep{0, 0})))) = 1.0;

    if (!cfg.p_scan.empty()) {
        const auto scan = postselect_scan(space, plan, psi0, cfg.t, cfg.steps, cfg.order,
                                          cfg.p_scan, cfg.shots, cfg.seed);
        json pts = json::array();
        for (const auto& pt : scan.points)
            pts.push_back({{"p", pt.p},
                           {"acceptance", pt.acceptance},
                           {"error", pt.error},
                           {"shots", pt.shots}});
        summary["p_scan"] = pts;
        summary["postselect_slope"] = scan.slope;
    } else if (cfg.error_p > 0.0) {
        const auto st = simulate_noisy_postselect(space, plan, psi0, cfg.t, cfg.steps, cfg.order,
                                                  {cfg.error_p, cfg.seed}, cfg.shots);
        summary["acceptance"] = st.acceptance;
        summary["postselected_error"] = st.error;
        summary["shots"] = st.shots;
    }

    const auto trace = evolve_trotter(space, plan, psi0, cfg.t, cfg.steps, cfg.order);
    trace.write_csv(cfg.output / "trace.csv");
    double max_gauge = 0.0, max_mod3 = 0.0;
    for (const auto& r : trace.records) {
        max_gauge = std::max(max_gauge, r.gauge_violation);
        max_mod3 = std::max(max_mod3, r.mod3_violation);
    }
    summary["steps"] = cfg.steps;
    summary["order"] = cfg.order;
    summary["max_gauge_violation"] = max_gauge;
    summary["max_mod3_violation"] = max_mod3;
    summary["final_norm"] = trace.records.back().norm;
    summary["final_energy"] = trace.records.back().energy;

    std::ofstream js(cfg.output / "summary.json");
    js << summary.dump(2) << "\n";
    std::cout << "wrote " << (cfg.output / "trace.csv").string() << " and summary.json\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, double tol, bool deep, const std::string& cache_dir) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, double value) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
        if (!ok) ++failures;
    };
    CGEngine cg;
    SingletBasisCache sb(cg);

    if (!cache_dir.empty()) {
        for (const auto& ent : std::filesystem::directory_iterator(cache_dir)) {
            if (ent.path().extension() != ".cgt") continue;
            try {
                (void)CGEngine::load(ent.path(), "");
                std::cout << "PASS cache " << ent.path().filename().string() << "\n";
            } catch (const std::exception& e) {
                std::cout << "FAIL cache " << ent.path().filename().string() << ": " << e.what()
                          << "\n";
                ++failures;
            }
        }
    }

    const std::vector<Irrep> fam = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
    double worst = 0.0;
    for (const Irrep a : fam)
        for (const Irrep b : fam)
            worst = std::max({worst, cg.verify_orthogonality(a, b), cg.verify_completeness(a, b)});
    check("cg-identities", worst <= 1e-12, worst);

    const double expected[2][2] = {{0.5, std::sqrt(3.0) / 2.0},
                                   {std::sqrt(3.0) / (2.0 * std::sqrt(2.0)), std::sqrt(10.0) / 4.0}};
    const Irrep r3b{0, 1}, r6{2, 0};
    const Irrep opts[2] = {r3b, r6};
    double vworst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double resid = 0.0;
            const double n = cg.vertex_factor_668(opts[i], opts[j], &resid);
            vworst = std::max({vworst, std::abs(std::abs(n) - expected[i][j]), resid});
        }
    check("vertex-factors", vworst <= tol, vworst);

    const auto r = qubit_count(1, 1);
    check("resource-formula", r.qubits_per_link == 18 && r.register_dims[0] == 3 &&
                                  r.register_dims[1] == 5 && r.register_dims[2] == 7,
          r.qubits_per_link);

    {
        // projector idempotence on a two-link through-vertex at lambda 1
        const auto geom = LatticeGeometry::custom(3, {{0, 1}, {1, 2}});
        GaugeProjector proj(geom, 1, sb);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-1, 1);
        SparseVec v;
        const FullBasisIndexer& ix = proj.indexer();
        for (int k = 0; k < 50; ++k) {
            std::vector<long> per(2);
            per[0] = rng() % ix.link_basis().size();
            per[1] = rng() % ix.link_basis().size();
            v[ix.pack(per)] += uni(rng);
        }
        SparseVec pv = proj.apply(v);
        SparseVec ppv = proj.apply(pv);
        double dev = 0.0;
        for (const auto& [k, x] : ppv) {
            auto it = pv.find(k);
            dev = std::max(dev, std::abs(x - (it == pv.end() ? 0.0 : it->second)));
        }
        for (const auto& [k, x] : pv)
            if (!ppv.count(k)) dev = std::max(dev, std::abs(x));
        check("projector-idempotence", dev <= 1e-12, dev);
    }

    {
        // oracle equivalence on the single plaquette
        const auto geom = LatticeGeometry::string_chain(1);
        GaugeProjector proj(geom, 1, sb);
        FullBasisIndexer ix(geom, 1);
        const auto full =
            plaquette_matrix(geom, ix, cg, 0, proj.basis(), proj.basis());
        const auto compiled = compile_plaquette(geom, 1, 0, sb);
        const auto& blk = compiled.sectors.at(0);
        Eigen::MatrixXd cbox = Eigen::MatrixXd::Zero(full.rows(), full.cols());
        // configs are (active pattern, mults); physical states align by construction
        const auto& phys = proj.physical();
        std::map<ActiveConfig, long> cpos;
        for (long i = 0; i < static_cast<long>(blk.configs.size()); ++i)
            cpos[blk.configs[i]] = i;
        const Eigen::MatrixXd dense = blk.dense();
        for (long i = 0; i < phys.size(); ++i)
            for (long j = 0; j < phys.size(); ++j) {
                ActiveConfig a, b;
                for (int k = 0; k < 4; ++k) {
                    a.active[k] = phys.states[i].pattern[geom.plaquettes[0].links[k]];
                    b.active[k] = phys.states[j].pattern[geom.plaquettes[0].links[k]];
                }
                a.mults = phys.states[i].mults;
                b.mults = phys.states[j].mults;
                cbox(i, j) = dense(cpos.at(a), cpos.at(b));
            }
        const double dev = (cbox - (full + full.transpose())).cwiseAbs().maxCoeff();
        check("oracle-equivalence-plaquette", dev <= tol, dev);

        if (deep) {
            const auto geom2 = LatticeGeometry::string_chain(2);
            const auto phys2 = enumerate_physical_basis(geom2, 1, sb);
            double dev2 = 0.0;
            for (int pi = 0; pi < 2; ++pi) {
                const auto c2 = compile_plaquette(geom2, 1, pi, sb);
                const Eigen::MatrixXd compiled2 =
                    compiled_plaquette_matrix_physical(geom2, phys2, c2);
                const Eigen::MatrixXd oracle2 =
                    tn_plaquette_matrix_physical(geom2, 1, cg, sb, phys2, pi);
                dev2 = std::max(dev2, (compiled2 - oracle2).cwiseAbs().maxCoeff());
            }
            check("oracle-equivalence-string", dev2 <= tol, dev2);
        }
    }

    return failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated SU(3) lattice toolkit: bases, compiled plaquette operators, "
                 "Trotter verification"};
    app.require_subcommand(1);

    CommonOpts copts;
    int scan_max = -1;
    double tol = 1e-10;
    bool deep = false;
    std::string cache_dir;

    auto* res = app.add_subcommand("resources", "qubit-count report per Eq.-style register layout");
    add_common(res, copts);
    auto* bld = app.add_subcommand("build-basis", "basis sizes and resource summary");
    add_common(bld, copts);
    auto* cmp = app.add_subcommand("compile", "compile plaquette operators to Givens programs");
    add_common(cmp, copts);
    cmp->add_option("--scan", scan_max, "also scan rotation counts up to this lambda");
    auto* evl = app.add_subcommand("evolve", "Trotterized evolution (optionally noisy)");
    add_common(evl, copts);
    auto* ver = app.add_subcommand("verify", "run the invariant check battery");
    add_common(ver, copts);
    ver->add_option("--tol", tol, "tolerance for value checks (default 1e-10)");
    ver->add_flag("--deep", deep, "include the slower string checks");
    ver->add_option("--cache-dir", cache_dir, "validate CG cache files in this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve_config(copts);
        if (res->parsed()) return cmd_resources(cfg);
        if (bld->parsed()) return cmd_build_basis(cfg);
        if (cmp->parsed()) return cmd_compile(cfg, scan_max);
        if (evl->parsed()) return cmd_evolve(cfg);
        if (ver->parsed()) return cmd_verify(cfg, tol, deep, cache_dir);
    } catch (const CapExceeded& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return kExitCap;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}
