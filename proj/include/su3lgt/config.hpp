#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "su3lgt/lattice.hpp"

namespace su3lgt {

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain-text key = value configuration ('#' comments). Keys:
//   dimension  1 | 2
//   extents    n  |  nx ny
//   boundary   open | periodic
//   lambda     truncation
//   g, a       couplings
//   t, steps, order   evolution window
//   error_p    bit-flip probability per register per step
//   p_scan     list of probabilities (enables the scan mode)
//   shots      Monte Carlo shots per point
//   seed       RNG seed
//   output     output directory
struct RunConfig {
    int dimension = 1;
    std::vector<int> extents = {1};
    Boundary boundary = Boundary::open;
    int lambda = 1;
    double g = 1.0;
    double a = 1.0;
    double t = 1.0;
    int steps = 100;
    int order = 2;
    double error_p = 0.0;
    std::vector<double> p_scan;
    long shots = 100000;
    uint64_t seed = 12345;
    std::filesystem::path output = "out";

    std::string raw;  // original text, echoed into artifacts

    static RunConfig parse_file(const std::filesystem::path& file);
    static RunConfig parse_text(const std::string& text);
    void apply(const std::string& key, const std::string& value);
    void validate() const;

    std::string normalized() const;  // canonical key=value text
    std::string hash_hex() const;    // fnv-1a of normalized()
    LatticeGeometry geometry() const;
};

}  // namespace su3lgt
