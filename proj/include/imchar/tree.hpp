#pragma once

// The trivalent tree of superbases.  A vertex is a character triple together
// with three Farey-labeled regions; slot 1 holds the X region (trace ix),
// slot 2 the Y region (trace iy), slot 3 the real region (trace z).  Each
// edge color flips one slot: the character by the corresponding Vieta
// involution, the region label by reflection across the Farey edge.
//
// The character directs the tree: an edge points from the larger region
// trace to the smaller one, and is indecisive when the absolute values tie.

#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <vector>

#include "character.hpp"
#include "farey.hpp"
#include "scalar.hpp"

namespace imchar {

template <class S>
struct RegionLabel {
    Fraction fraction;
    RegionParity parity;
    S trace;
};

template <class S>
struct Vertex {
    ImaginaryCharacter<S> character;
    std::array<Fraction, 3> fractions;  // slots 1,2,3 at indices 0,1,2
    MoveWord address;                   // reduced word from the base vertex

    const S& slot_trace(int color) const {
        switch (color) {
            case 1: return character.x;
            case 2: return character.y;
            case 3: return character.z;
        }
        throw std::invalid_argument("slot color must be 1, 2 or 3");
    }

    RegionLabel<S> region(int color) const {
        const Fraction& f = fractions[static_cast<std::size_t>(color - 1)];
        return {f, parity_of(f), slot_trace(color)};
    }

    // The real region always sits in slot 3.
    RegionLabel<S> real_region() const { return region(3); }
};

// Base labeling X -> [1:0], Y -> [0:1], Z -> [1:1]: the homology classes of
// the chosen generators, with parities (odd,even), (even,odd), (odd,odd).
template <class S>
Vertex<S> base_vertex(const ImaginaryCharacter<S>& c) {
    return {c, {Fraction::make(1, 0), Fraction::make(0, 1), Fraction::make(1, 1)}, {}};
}

namespace detail {

// Flipped coordinate value for one edge color.
template <class S>
S flipped_coordinate(const ImaginaryCharacter<S>& c, int color) {
    switch (color) {
        case 1: return c.y * c.z - c.x;
        case 2: return c.x * c.z - c.y;
        case 3: return -c.x * c.y - c.z;
    }
    throw std::invalid_argument("color must be 1, 2 or 3");
}

}  // namespace detail

template <class S>
Vertex<S> step(const Vertex<S>& v, int color) {
    Vertex<S> out = v;
    out.character = apply(v.character, vieta_of_color(color));
    int a = color % 3 + 1, b = (color + 1) % 3 + 1;  // the two kept slots
    out.fractions[static_cast<std::size_t>(color - 1)] =
        farey_flip(v.fractions[static_cast<std::size_t>(a - 1)],
                   v.fractions[static_cast<std::size_t>(b - 1)],
                   v.fractions[static_cast<std::size_t>(color - 1)]);
    Generator g = vieta_of_color(color);
    if (!out.address.empty() && out.address.back() == g)
        out.address.pop_back();  // stepping back cancels
    else
        out.address.push_back(g);
    return out;
}

enum class EdgeDirection : std::uint8_t { TowardSelf, AwayFromSelf };

template <class S>
struct DirectedEdgeInfo {
    int color;
    bool decisive;            // |old| != |new| (up to the tolerance policy)
    EdgeDirection direction;  // arrow points from larger to smaller-or-equal
    S flipped_value;
};

template <class S>
DirectedEdgeInfo<S> edge_info(const Vertex<S>& v, int color) {
    using sc = scalar<S>;
    S flipped = detail::flipped_coordinate(v.character, color);
    const S& current = v.slot_trace(color);
    bool decisive = !sc::eq_abs(flipped, current);
    EdgeDirection dir = (decisive && sc::less_abs(flipped, current))
                            ? EdgeDirection::AwayFromSelf
                            : EdgeDirection::TowardSelf;
    return {color, decisive, dir, std::move(flipped)};
}

enum class VertexType : std::uint8_t { Source, Fork, Merge, Sink };

// Counts inward edges; an indecisive edge counts as inward for both of its
// endpoints, so an attracting indecisive edge yields two Sink-typed ends.
template <class S>
VertexType vertex_type(const Vertex<S>& v) {
    int inward = 0;
    for (int color = 1; color <= 3; ++color) {
        auto e = edge_info(v, color);
        if (!e.decisive || e.direction == EdgeDirection::TowardSelf) ++inward;
    }
    switch (inward) {
        case 0: return VertexType::Source;
        case 1: return VertexType::Fork;
        case 2: return VertexType::Merge;
        default: return VertexType::Sink;
    }
}

template <class S>
struct ForkViolation {
    int away_color_a, away_color_b;  // the two edges pointing strictly away
    int third_color;
    S third_trace;
};

// Fork Lemma: if two edges point (decisively) away from v, the remaining
// region must satisfy |trace| <= 2 unless both flipped coordinates vanish.
// The check needs only the character triple.
template <class S>
std::optional<ForkViolation<S>> fork_lemma_check(const ImaginaryCharacter<S>& c) {
    using sc = scalar<S>;
    const S* cur[4] = {nullptr, &c.x, &c.y, &c.z};
    std::array<bool, 4> away{};
    for (int color = 1; color <= 3; ++color) {
        S flipped = detail::flipped_coordinate(c, color);
        away[static_cast<std::size_t>(color)] =
            !sc::eq_abs(flipped, *cur[color]) && sc::less_abs(flipped, *cur[color]);
    }
    for (int a = 1; a <= 3; ++a)
        for (int b = a + 1; b <= 3; ++b) {
            if (!away[static_cast<std::size_t>(a)] || !away[static_cast<std::size_t>(b)]) continue;
            int third = 6 - a - b;
            const S& t = *cur[third];
            if (sc::abs(t) <= S(2)) continue;
            if (sc::is_zero(*cur[a]) && sc::is_zero(*cur[b])) continue;
            return ForkViolation<S>{a, b, third, t};
        }
    return std::nullopt;
}

template <class S>
std::optional<ForkViolation<S>> fork_lemma_check(const Vertex<S>& v) {
    return fork_lemma_check(v.character);
}

// Traces of the regions abutting the real region of v, indexed so that
// n = 0, 1 give the two imaginary slot traces (x, y).  Three-term recursion
// y_{n+1} = z y_n - y_{n-1}; valid for every z including the parabolic
// values z = +-2.
template <class S>
std::vector<S> alternating_geodesic(const Vertex<S>& v, int region_slot, long n_min, long n_max) {
    if (region_slot != 3 || v.region(3).parity != RegionParity::RealRegion)
        throw std::invalid_argument("alternating_geodesic: chosen region must be the real region");
    if (n_min > n_max) throw std::invalid_argument("alternating_geodesic: empty index range");
    const S& z = v.character.z;
    std::vector<S> fwd{v.character.x, v.character.y};  // indices 0, 1
    while (static_cast<long>(fwd.size()) - 1 < n_max)
        fwd.push_back(z * fwd[fwd.size() - 1] - fwd[fwd.size() - 2]);
    std::vector<S> bwd;  // indices -1, -2, ...
    {
        S prev = fwd[1], cur = fwd[0];
        for (long n = -1; n >= n_min; --n) {
            S next = z * cur - prev;  // y_{n} from y_{n+1}, y_{n+2}
            bwd.push_back(next);
            prev = cur;
            cur = next;
        }
    }
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(n_max - n_min + 1));
    for (long n = n_min; n <= n_max; ++n) {
        if (n < 0)
            out.push_back(bwd[static_cast<std::size_t>(-n - 1)]);
        else
            out.push_back(fwd[static_cast<std::size_t>(n)]);
    }
    return out;
}

// Product of the closed-form coefficients for the geodesic around a real
// region: a*b = (k + 2 - z^2) / (z^2 - 4).  Its sign separates the three
// geodesic regimes.
template <class S>
S ab_product(const S& z, const S& k) {
    S den = z * z - S(4);
    if (scalar<S>::is_zero(den)) throw std::domain_error("ab_product: z = +-2");
    return (k + S(2) - z * z) / den;
}

// Closed form y_n = a lambda^n + b lambda^-n with lambda + 1/lambda = z.
struct GeodesicFit {
    double a, b, lambda;
};

inline GeodesicFit fit_alternating_geodesic(double z, double y0, double y1) {
    if (z * z <= 4.0)
        throw std::domain_error("fit_alternating_geodesic: requires |z| > 2");
    double disc = std::sqrt(z * z - 4.0);
    double lambda = (z + (z > 0 ? disc : -disc)) / 2.0;  // |lambda| > 1 branch
    double li = 1.0 / lambda;
    double a = (y1 - li * y0) / (lambda - li);
    double b = (lambda * y0 - y1) / (lambda - li);
    return {a, b, lambda};
}

inline double geodesic_closed_form(const GeodesicFit& f, long n) {
    return f.a * std::pow(f.lambda, double(n)) + f.b * std::pow(f.lambda, double(-n));
}

// Parabolic closed forms: z = 2 gives y_n = y0 + n (y1 - y0);
// z = -2 gives y_n = (-1)^n (y0 - n (y0 + y1)).
template <class S>
S geodesic_parabolic(const S& z, const S& y0, const S& y1, long n) {
    if (z == S(2)) return y0 + S(n) * (y1 - y0);
    if (z == S(-2)) {
        S v = y0 - S(n) * (y0 + y1);
        return (n % 2 == 0) ? v : -v;
    }
    throw std::domain_error("geodesic_parabolic: requires z = +-2");
}

enum class GeodesicRegime : std::uint8_t {
    Elliptic,                  // |z| < 2
    ParabolicBoundary,         // |z| = 2
    SinkOnBoundary,            // k > 2, 2 < |z| < sqrt(k+2): unique sink, rest merges
    AllMergesOneDirection,     // k > 2, |z| = sqrt(k+2)
    OneOutwardMerge,           // k > 2, |z| > sqrt(k+2)
    SinkOrMergeByComparison};  // k < 2, |z| >= 2: sink or merge decided by |z| vs |z'|

inline GeodesicRegime classify_real_region_geodesic(double z, double k) {
    using sc = scalar<double>;
    double az = std::fabs(z);
    if (sc::eq(az, 2.0)) return GeodesicRegime::ParabolicBoundary;
    if (az < 2.0) return GeodesicRegime::Elliptic;
    if (k < 2.0) return GeodesicRegime::SinkOrMergeByComparison;
    double bound = std::sqrt(k + 2.0);
    if (sc::eq(az, bound)) return GeodesicRegime::AllMergesOneDirection;
    return az < bound ? GeodesicRegime::SinkOnBoundary : GeodesicRegime::OneOutwardMerge;
}

// An edge is indecisive for an unexceptional real-or-imaginary character
// exactly when the flipped coordinate equals the old one (orthogonal axes).
template <class S>
bool is_orthogonal_indecisive(const Vertex<S>& v, int color) {
    return scalar<S>::eq(detail::flipped_coordinate(v.character, color), v.slot_trace(color));
}

}  // namespace imchar
