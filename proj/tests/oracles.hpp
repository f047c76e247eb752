// Test-side oracles, independent of the library's construction paths.
#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "su3lgt/rep.hpp"

namespace oracles {

using su3lgt::Irrep;

// The eight Gell-Mann matrices over 2 (fundamental generators), hand-coded.
inline std::vector<Eigen::Matrix3cd> gellmann_halves() {
    using C = std::complex<double>;
    std::vector<Eigen::Matrix3cd> t(8, Eigen::Matrix3cd::Zero());
    t[0](0, 1) = t[0](1, 0) = 1;
    t[1](0, 1) = C(0, -1);
    t[1](1, 0) = C(0, 1);
    t[2](0, 0) = 1;
    t[2](1, 1) = -1;
    t[3](0, 2) = t[3](2, 0) = 1;
    t[4](0, 2) = C(0, -1);
    t[4](2, 0) = C(0, 1);
    t[5](1, 2) = t[5](2, 1) = 1;
    t[6](1, 2) = C(0, -1);
    t[6](2, 1) = C(0, 1);
    t[7](0, 0) = t[7](1, 1) = 1.0 / std::sqrt(3.0);
    t[7](2, 2) = -2.0 / std::sqrt(3.0);
    for (auto& m : t) m /= 2.0;
    return t;
}

// su(3) structure constants from the fundamental: f_abc = -2i tr([Ta,Tb]Tc)
inline std::vector<Eigen::Matrix<std::complex<double>, 8, 8>> adjoint_generators() {
    const auto t = gellmann_halves();
    std::vector<Eigen::Matrix<std::complex<double>, 8, 8>> adj(
        8, Eigen::Matrix<std::complex<double>, 8, 8>::Zero());
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c) {
                const std::complex<double> f =
                    -2.0 * std::complex<double>(0, 1) * ((t[a] * t[b] - t[b] * t[a]) * t[c]).trace();
                adj[a](b, c) = std::complex<double>(0, -1) * f;  // (T^a_adj)_bc = -i f_abc
            }
    return adj;
}

// weight multiset (2Tz, 3Y) of an irrep, via the library's state enumeration
inline std::map<std::pair<int, int>, int> weight_multiset(Irrep r) {
    std::map<std::pair<int, int>, int> w;
    for (const auto& s : su3lgt::enumerate_states(r)) ++w[{s.twice_tz, s.y_times3}];
    return w;
}

// tensor decomposition by convolving weight multisets and peeling highest
// weights (independent of the Littlewood-Richardson implementation)
inline std::map<Irrep, int> decompose_by_peeling(Irrep r1, Irrep r2) {
    std::map<std::pair<int, int>, long> ws;
    for (const auto& [wa, ma] : weight_multiset(r1))
        for (const auto& [wb, mb] : weight_multiset(r2))
            ws[{wa.first + wb.first, wa.second + wb.second}] += long(ma) * mb;
    std::map<Irrep, int> terms;
    while (!ws.empty()) {
        auto best = ws.begin();
        long bestscore = -1000000;
        for (auto it = ws.begin(); it != ws.end(); ++it) {
            const long score = 2L * it->first.first + 3L * it->first.second;
            if (score > bestscore ||
                (score == bestscore && it->first.first > best->first.first)) {
                bestscore = score;
                best = it;
            }
        }
        const int p = best->first.first;
        const int q = (best->first.second - p) / 2;
        terms[{p, q}] += 1;
        for (const auto& [w, m] : weight_multiset({p, q})) {
            auto it = ws.find(w);
            it->second -= m;
            if (it->second == 0) ws.erase(it);
        }
    }
    return terms;
}

}  // namespace oracles
