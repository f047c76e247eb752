#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace su3lgt {

using Rational = boost::rational<long long>;

// SU(3) irreducible representation labeled by tensor indices (p, q).
struct Irrep {
    int p = 0;
    int q = 0;
    auto operator<=>(const Irrep&) const = default;
};

inline long dimension(Irrep r) {
    return static_cast<long>(r.p + 1) * (r.q + 1) * (r.p + r.q + 2) / 2;
}

inline Irrep conjugate(Irrep r) { return {r.q, r.p}; }

// Triality (p - q) mod 3; conserved mod 3 by all tensor couplings.
inline int triality(Irrep r) { return ((r.p - r.q) % 3 + 3) % 3; }

// Quadratic Casimir, normalized so the fundamental generators are half the
// Gell-Mann matrices: C2(p,q) = (p^2 + q^2 + pq)/3 + p + q.
inline Rational casimir2(Irrep r) {
    long long p = r.p, q = r.q;
    return Rational(p * p + q * q + p * q, 3) + Rational(p + q);
}

// One weight state of an irrep. Half-integers are stored doubled and the
// hypercharge tripled so everything stays exact in integers.
struct WeightState {
    Irrep irrep;
    int twice_t = 0;   // 2T
    int twice_tz = 0;  // 2Tz
    int y_times3 = 0;  // 3Y
    int inner_mult = 0;  // always 0 for SU(3): (T,Tz,Y) determines the state

    Rational t() const { return Rational(twice_t, 2); }
    Rational tz() const { return Rational(twice_tz, 2); }
    Rational y() const { return Rational(y_times3, 3); }
};

struct TensorDecomposition {
    Irrep r1, r2;
    std::vector<std::pair<Irrep, int>> terms;  // (irrep, outer multiplicity), sorted by (p,q)
};

std::string to_string(Irrep r);

}  // namespace su3lgt
