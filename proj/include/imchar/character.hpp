#pragma once

// The state type and the group action in real coordinates.  A character
// (ix, iy, z) of the rank-2 free group is stored as the real triple
// (x, y, z).  The group is generated by the three Vieta involutions, the
// three sign-changes, and the coordinate swap; every generator preserves
//
//     kappa(x, y, z) = -x^2 - y^2 + z^2 + x*y*z - 2.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalar.hpp"

namespace imchar {

enum class Generator : std::uint8_t { V1, V2, V3, S1, S2, S3, P12 };

inline constexpr std::array<Generator, 7> kAllGenerators = {
    Generator::V1, Generator::V2, Generator::V3,
    Generator::S1, Generator::S2, Generator::S3, Generator::P12};

inline bool is_vieta(Generator g) {
    return g == Generator::V1 || g == Generator::V2 || g == Generator::V3;
}

// Vieta generator for a coordinate slot (1, 2 or 3).
inline Generator vieta_of_color(int color) {
    switch (color) {
        case 1: return Generator::V1;
        case 2: return Generator::V2;
        case 3: return Generator::V3;
    }
    throw std::invalid_argument("color must be 1, 2 or 3");
}

inline int color_of_vieta(Generator g) {
    switch (g) {
        case Generator::V1: return 1;
        case Generator::V2: return 2;
        case Generator::V3: return 3;
        default: throw std::invalid_argument("not a Vieta generator");
    }
}

template <class S>
struct ImaginaryCharacter {
    S x{}, y{}, z{};

    friend bool operator==(const ImaginaryCharacter& a, const ImaginaryCharacter& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

using MoveWord = std::vector<Generator>;

template <class S>
S kappa(const ImaginaryCharacter<S>& c) {
    return -c.x * c.x - c.y * c.y + c.z * c.z + c.x * c.y * c.z - S(2);
}

template <class S>
ImaginaryCharacter<S> apply(const ImaginaryCharacter<S>& c, Generator g) {
    switch (g) {
        case Generator::V1: return {c.y * c.z - c.x, c.y, c.z};
        case Generator::V2: return {c.x, c.x * c.z - c.y, c.z};
        case Generator::V3: return {c.x, c.y, -c.x * c.y - c.z};
        case Generator::S1: return {c.x, -c.y, -c.z};
        case Generator::S2: return {-c.x, c.y, -c.z};
        case Generator::S3: return {-c.x, -c.y, c.z};
        case Generator::P12: return {c.y, c.x, c.z};
    }
    throw std::logic_error("unreachable");
}

// Left-to-right composition; the empty word is the identity.
template <class S>
ImaginaryCharacter<S> apply_word(ImaginaryCharacter<S> c, const MoveWord& w) {
    for (Generator g : w) c = apply(c, g);
    return c;
}

// A word is reduced when no two consecutive Vieta generators are equal
// (each Vieta generator is an involution, so such a pair cancels).
inline bool word_is_reduced(const MoveWord& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (is_vieta(w[i]) && w[i] == w[i + 1]) return false;
    return true;
}

// Words serialize over the alphabet {1,2,3,a,b,c,p}.
inline char generator_char(Generator g) {
    switch (g) {
        case Generator::V1: return '1';
        case Generator::V2: return '2';
        case Generator::V3: return '3';
        case Generator::S1: return 'a';
        case Generator::S2: return 'b';
        case Generator::S3: return 'c';
        case Generator::P12: return 'p';
    }
    throw std::logic_error("unreachable");
}

inline std::string format_word(const MoveWord& w) {
    std::string s;
    s.reserve(w.size());
    for (Generator g : w) s.push_back(generator_char(g));
    return s;
}

inline MoveWord parse_word(std::string_view text) {
    MoveWord w;
    w.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '1': w.push_back(Generator::V1); break;
            case '2': w.push_back(Generator::V2); break;
            case '3': w.push_back(Generator::V3); break;
            case 'a': w.push_back(Generator::S1); break;
            case 'b': w.push_back(Generator::S2); break;
            case 'c': w.push_back(Generator::S3); break;
            case 'p': w.push_back(Generator::P12); break;
            default:
                throw std::invalid_argument(std::string("bad word letter '") + c +
                                            "', expected one of 123abcp");
        }
    }
    return w;
}

// Boundary traces of the two-holed cross-surface: z and z' = -xy - z.
template <class S>
std::pair<S, S> boundary_traces_c02(const ImaginaryCharacter<S>& c) {
    return {c.z, -c.x * c.y - c.z};
}

// Boundary trace of the one-holed Klein bottle; satisfies
// delta = z^2 - kappa identically.
template <class S>
S boundary_trace_c11(const ImaginaryCharacter<S>& c) {
    return c.x * c.x - c.z * c.x * c.y + c.y * c.y + S(2);
}

// Fricke space of the two-holed cross-surface: z <= -2 and xy + z >= 2,
// i.e. both boundary traces are <= -2.
template <class S>
bool in_fricke_c02(const ImaginaryCharacter<S>& c) {
    return c.z <= S(-2) && c.x * c.y + c.z >= S(2);
}

enum class BoundaryCase : std::uint8_t { Geodesic, Cusp, Cone };

// Boundary geometry of a one-holed Klein bottle structure.  `value` is the
// geodesic length 2*acosh(-delta/2) or the cone angle 2*acos(-delta/2);
// the raw trace delta is kept alongside.
struct BoundaryKind {
    BoundaryCase kind;
    double value;  // length (Geodesic), 0 (Cusp), angle in (0, 2*pi) (Cone)
    double delta;
};

namespace detail {

inline BoundaryKind boundary_kind_from_delta(double delta, bool delta_is_exact) {
    bool cusp = delta_is_exact ? delta == -2.0 : scalar<double>::eq(delta, -2.0);
    if (cusp) return {BoundaryCase::Cusp, 0.0, delta};
    if (delta < -2.0) return {BoundaryCase::Geodesic, 2.0 * std::acosh(-delta / 2.0), delta};
    return {BoundaryCase::Cone, 2.0 * std::acos(-delta / 2.0), delta};
}

}  // namespace detail

// Membership in the generalized Fricke space of the one-holed Klein bottle:
// |z| > 2 and x^2 - z*x*y + y^2 < 0 (strict; delta = 2 boundary points are
// non-members).  Returns the boundary kind determined by delta.
template <class S>
std::optional<BoundaryKind> in_generalized_fricke_c11(const ImaginaryCharacter<S>& c) {
    using sc = scalar<S>;
    if (!(sc::abs(c.z) > S(2))) return std::nullopt;
    S q = c.x * c.x - c.z * c.x * c.y + c.y * c.y;
    if (!(q < S(0))) return std::nullopt;
    return detail::boundary_kind_from_delta(sc::to_double(q) + 2.0, sc::exact);
}

enum class ExceptionalKind : std::uint8_t { Reducible, CoordinateZero, Dihedral };

// Dihedral if x = y = 0; CoordinateZero if exactly one of x, y vanishes;
// Reducible if kappa = 2.  Zero tests are exact in both modes.
template <class S>
std::optional<ExceptionalKind> exceptional_kind(const ImaginaryCharacter<S>& c) {
    using sc = scalar<S>;
    bool zx = sc::is_zero(c.x), zy = sc::is_zero(c.y);
    if (zx && zy) return ExceptionalKind::Dihedral;
    if (zx != zy) return ExceptionalKind::CoordinateZero;
    if (sc::eq(kappa(c), S(2))) return ExceptionalKind::Reducible;
    return std::nullopt;
}

// Nielsen move (Dehn twist) along the real region: (x,y,z) -> (xz-y, x, z).
// Preserves kappa and z.
template <class S>
ImaginaryCharacter<S> nielsen_twist(const ImaginaryCharacter<S>& c) {
    return {c.x * c.z - c.y, c.x, c.z};
}

}  // namespace imchar
