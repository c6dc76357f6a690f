#pragma once

#include <cstdint>
#include <string>

#include "strmach/errors.hpp"

namespace strmach {

// Filtration degrees are machine-size naturals with checked arithmetic.
using Nat = std::uint64_t;

inline Nat nat_add(Nat a, Nat b) {
    Nat r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw DegreeOverflowError("degree addition overflow");
    return r;
}

inline Nat nat_mul(Nat a, Nat b) {
    Nat r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw DegreeOverflowError("degree multiplication overflow");
    return r;
}

// An N^2 degree (a, b), read as the linear polynomial a*X + b. Ordered
// componentwise; added componentwise.
struct Degree2 {
    Nat linear = 0;
    Nat constant = 0;

    friend bool operator==(const Degree2&, const Degree2&) = default;

    // Permissive stand-in for the unfiltered state category: large enough
    // that no desk-scale term ever reaches it, small enough that shifted
    // bounds stay representable.
    static constexpr Degree2 permissive() { return Degree2{Nat(1) << 40, Nat(1) << 40}; }
};

inline Degree2 deg2_add(Degree2 x, Degree2 y) {
    return Degree2{nat_add(x.linear, y.linear), nat_add(x.constant, y.constant)};
}

inline Degree2 operator+(Degree2 x, Degree2 y) { return deg2_add(x, y); }

inline bool deg2_leq(Degree2 x, Degree2 y) {
    return x.linear <= y.linear && x.constant <= y.constant;
}

// Maximum output-function degree for a variable of degree v under a state
// morphism of degree ell: a*X + b becomes a*X + (a*ell + b).
inline Degree2 deg2_shift(Degree2 v, Nat ell) {
    return Degree2{v.linear, nat_add(nat_mul(v.linear, ell), v.constant)};
}

inline std::string to_string(Degree2 d) {
    return "(" + std::to_string(d.linear) + "," + std::to_string(d.constant) + ")";
}

}  // namespace strmach
