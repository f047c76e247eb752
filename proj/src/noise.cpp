#include "su3lgt/noise.hpp"

namespace su3lgt {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

// permutation of basis indices for flipping one register bit
std::vector<long> flip_permutation(const PatternSpace& space, int link, int reg, int bit) {
    std::vector<long> perm(space.size());
    for (long i = 0; i < space.size(); ++i) {
        const uint64_t flat = space.indexer.index(space.patterns[i]);
        const uint64_t flipped = space.indexer.flip_bit(flat, link, reg, bit);
        auto it = space.pos.find(flipped);
        perm[i] = it == space.pos.end() ? i : it->second;
    }
    return perm;
}

void apply_perm(const std::vector<long>& perm, VectorXcd& psi, VectorXcd& scratch) {
    for (long i = 0; i < psi.size(); ++i) scratch(perm[i]) = psi(i);
    psi.swap(scratch);
}

}  // namespace

NoisyRunStats simulate_noisy_postselect(const PatternSpace& space, const TrotterPlan& plan,
                                        const VectorXcd& psi0, double t, int n_steps, int order,
                                        const ErrorModelConfig& err, long shots) {
    if (space.size() != static_cast<long>(space.indexer.size()))
        throw std::invalid_argument("noisy simulation needs the full pattern space");
    const int nlinks = static_cast<int>(space.geom.links.size());
    const int bits = space.indexer.bits_per_register();
    const int nregbits = 2 * nlinks * bits;

    std::vector<std::vector<long>> perms;
    for (int l = 0; l < nlinks; ++l)
        for (int reg = 0; reg < 2; ++reg)
            for (int b = 0; b < bits; ++b) perms.push_back(flip_permutation(space, l, reg, b));

    // noiseless reference with identical stepping
    VectorXcd ideal = psi0;
    const double dt = n_steps > 0 ? t / n_steps : 0.0;
    for (int k = 0; k < n_steps; ++k) trotter_step(plan, ideal, dt, order);

    double acc_sum = 0.0, fid_sum = 0.0;
    long simulated = 0;
    VectorXcd psi(space.size()), scratch(space.size());
    std::vector<std::pair<int, int>> events;  // (step, register-bit)
    for (long shot = 0; shot < shots; ++shot) {
        std::mt19937_64 rng(splitmix64(err.seed ^ (0x5851f42d4c957f2dULL * (shot + 1))));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        events.clear();
        for (int k = 0; k < n_steps; ++k)
            for (int rb = 0; rb < nregbits; ++rb)
                if (uni(rng) < err.p) events.emplace_back(k, rb);
        if (events.empty()) {  // identical to the reference run
            acc_sum += 1.0;
            fid_sum += 1.0;
            continue;
        }
        ++simulated;
        psi = psi0;
        size_t e = 0;
        for (int k = 0; k < n_steps; ++k) {
            trotter_step(plan, psi, dt, order);
            while (e < events.size() && events[e].first == k) {
                apply_perm(perms[events[e].second], psi, scratch);
                ++e;
            }
        }
        double acc = 0.0;
        for (long i = 0; i < space.size(); ++i)
            if (space.mod3_ok[i]) acc += std::norm(psi(i));
        acc_sum += acc;
        fid_sum += std::norm(ideal.dot(psi));
    }
    NoisyRunStats st;
    st.p = err.p;
    st.shots = shots;
    st.simulated_shots = simulated;
    st.acceptance = acc_sum / shots;
    st.fidelity = st.acceptance > 0 ? (fid_sum / shots) / st.acceptance : 0.0;
    st.error = 1.0 - st.fidelity;
    return st;
}

PostselectScan postselect_scan(const PatternSpace& space, const TrotterPlan& plan,
                               const VectorXcd& psi0, double t, int n_steps, int order,
                               const std::vector<double>& ps, long shots, uint64_t seed) {
    PostselectScan scan;
    std::vector<double> xs, ys;
    for (size_t k = 0; k < ps.size(); ++k) {
        ErrorModelConfig err{ps[k], splitmix64(seed + k)};
        scan.points.push_back(
            simulate_noisy_postselect(space, plan, psi0, t, n_steps, order, err, shots));
        if (scan.points.back().error > 0) {
            xs.push_back(ps[k]);
            ys.push_back(scan.points.back().error);
        }
    }
    scan.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
    return scan;
}

}  // namespace su3lgt
