#pragma once

#include "su3lgt/evolve.hpp"

namespace su3lgt {

// Incoherent bit-flip errors on the binary-coded irrep registers (one p and
// one q register per link), applied after every Trotter step. Post-selection
// keeps only shots whose final state passes the mod-3 test at every vertex.
struct ErrorModelConfig {
    double p = 0.0;  // flip probability per register per step
    uint64_t seed = 12345;
};

struct NoisyRunStats {
    double p = 0.0;
    long shots = 0;
    long simulated_shots = 0;  // shots with at least one flip event
    double acceptance = 0.0;   // mean post-selection weight
    double fidelity = 0.0;     // post-selected fidelity vs noiseless Trotter
    double error = 0.0;        // 1 - fidelity
};

// requires a pattern space enumerating ALL irrep assignments
NoisyRunStats simulate_noisy_postselect(const PatternSpace& space, const TrotterPlan& plan,
                                        const VectorXcd& psi0, double t, int n_steps, int order,
                                        const ErrorModelConfig& err, long shots);

struct PostselectScan {
    std::vector<NoisyRunStats> points;
    double slope = 0.0;  // log-log slope of error vs p
};

PostselectScan postselect_scan(const PatternSpace& space, const TrotterPlan& plan,
                               const VectorXcd& psi0, double t, int n_steps, int order,
                               const std::vector<double>& ps, long shots, uint64_t seed);

uint64_t splitmix64(uint64_t x);

}  // namespace su3lgt
