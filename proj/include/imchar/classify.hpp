#pragma once

// The descending-path algorithm.  From the base vertex, repeatedly follow
// the strictly-outward edge with the largest absolute decrease.  Terminal
// events: a sink (Fricke orbits), an attracting indecisive edge, an elliptic
// real region (k < 2), an exceptional vertex, or budget exhaustion.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "character.hpp"
#include "farey.hpp"
#include "scalar.hpp"
#include "tree.hpp"

namespace imchar {

struct Budget {
    int max_depth = 10000;
    double max_abs = 1e300;          // coordinate blow-up guard on growing walks
    long geodesic_walk_limit = 100000;

    void validate() const {
        if (max_depth <= 0 || max_abs <= 0 || geodesic_walk_limit <= 0)
            throw std::invalid_argument("budget fields must be positive");
    }
};

struct EndEstimate {
    std::optional<Fraction> rational;  // totally odd end, when the tail circles a real region
    std::vector<long> cf_prefix;       // otherwise: continued-fraction prefix of the end
};

template <class S>
struct GeneralizedFrickeC11Result {
    ImaginaryCharacter<S> sink;
    BoundaryKind boundary;
    S delta;
    MoveWord word;
};

template <class S>
struct FrickeC02Result {
    ImaginaryCharacter<S> sink;  // sign-normalized: both boundary traces <= -2
    MoveWord word;
};

template <class S>
struct AttractingIndecisiveEdgeResult {
    ImaginaryCharacter<S> a, b;  // the two endpoint characters
    int color;                   // slot flipped by the indecisive edge
    MoveWord word;
};

template <class S>
struct EllipticPrimitiveResult {
    Fraction region_fraction;  // totally odd
    S trace;                   // in [-2, 2]
    MoveWord word;
};

struct ExceptionalResult {
    ExceptionalKind kind;
};

struct UndeterminedResult {
    int depth_reached;
    EndEstimate end_estimate;
    MoveWord word;  // the address walked so far
};

template <class S>
using Classification =
    std::variant<GeneralizedFrickeC11Result<S>, FrickeC02Result<S>,
                 AttractingIndecisiveEdgeResult<S>, EllipticPrimitiveResult<S>,
                 ExceptionalResult, UndeterminedResult>;

enum class ClassVariant : std::uint8_t {
    GeneralizedFrickeC11,
    FrickeC02,
    AttractingIndecisiveEdge,
    EllipticPrimitive,
    Exceptional,
    Undetermined
};

template <class S>
ClassVariant variant_of(const Classification<S>& c) {
    return static_cast<ClassVariant>(c.index());
}

// One descending step: the strictly-outward edge with the largest absolute
// decrease (ties broken by lowest color), or nothing at a sink / attracting
// indecisive edge.
template <class S>
std::optional<std::pair<int, Vertex<S>>> descend_step(const Vertex<S>& v) {
    using sc = scalar<S>;
    int best = 0;
    S best_drop{};
    for (int color = 1; color <= 3; ++color) {
        auto e = edge_info(v, color);
        if (!e.decisive || e.direction != EdgeDirection::AwayFromSelf) continue;
        S drop = sc::abs(v.slot_trace(color)) - sc::abs(e.flipped_value);
        if (best == 0 || drop > best_drop) {
            best = color;
            best_drop = drop;
        }
    }
    if (best == 0) return std::nullopt;
    return std::make_pair(best, step(v, best));
}

namespace detail {

// Replays a color word over the base Farey labels, returning the three
// region fractions at the end of the path.
inline std::array<Fraction, 3> replay_fractions(const MoveWord& word) {
    std::array<Fraction, 3> f{Fraction::make(1, 0), Fraction::make(0, 1), Fraction::make(1, 1)};
    for (Generator g : word) {
        if (!is_vieta(g)) continue;  // sign-changes and the swap do not move the vertex
        int c = color_of_vieta(g);
        int a = c % 3 + 1, b = (c + 1) % 3 + 1;
        f[static_cast<std::size_t>(c - 1)] =
            farey_flip(f[static_cast<std::size_t>(a - 1)], f[static_cast<std::size_t>(b - 1)],
                       f[static_cast<std::size_t>(c - 1)]);
    }
    return f;
}

template <class S>
S flip_coord(const S& cur, const S& u, const S& v, int color) {
    // color 3 flips by -uv - cur, colors 1/2 by uv - cur in suitable order;
    // callers pass the right pair, so only the sign differs.
    return color == 3 ? -u * v - cur : u * v - cur;
}

template <class S>
std::array<S, 3> flips_of(const ImaginaryCharacter<S>& c) {
    return {c.y * c.z - c.x, c.x * c.z - c.y, -c.x * c.y - c.z};
}

template <class S>
const S& coord(const ImaginaryCharacter<S>& c, int color) {
    switch (color) {
        case 1: return c.x;
        case 2: return c.y;
        default: return c.z;
    }
}

template <class S>
void set_coord(ImaginaryCharacter<S>& c, int color, S v) {
    switch (color) {
        case 1: c.x = std::move(v); break;
        case 2: c.y = std::move(v); break;
        default: c.z = std::move(v); break;
    }
}

}  // namespace detail

// Tail pattern of Vieta colors -> estimate of the limiting end.  A tail that
// settles into alternating colors 1,2 circles the current real region, whose
// totally odd fraction is the end; otherwise the end is pinned inside the
// final Farey triangle and we report the common continued-fraction prefix of
// its corners.
inline std::optional<EndEstimate> end_invariant_estimate(const MoveWord& address,
                                                         std::size_t tail_window = 64,
                                                         std::size_t min_alternations = 4) {
    std::vector<int> colors;
    colors.reserve(address.size());
    for (Generator g : address)
        if (is_vieta(g)) colors.push_back(color_of_vieta(g));
    if (colors.empty()) return std::nullopt;

    // longest suffix alternating between colors 1 and 2, within the window
    std::size_t tail = std::min(tail_window, colors.size());
    std::size_t suffix = 0;
    for (std::size_t i = colors.size(); i-- > colors.size() - tail;) {
        if (colors[i] == 3) break;
        if (suffix > 0 && colors[i] == colors[i + 1]) break;
        ++suffix;
    }
    bool alternating_12 = suffix >= min_alternations;

    auto fr = detail::replay_fractions(address);
    EndEstimate est;
    if (alternating_12) {
        est.rational = fr[2];  // the enclosing real region
        return est;
    }
    std::vector<std::vector<long>> cfs;
    for (const auto& f : fr)
        if (!f.is_infinity()) cfs.push_back(continued_fraction(f));
    if (cfs.size() >= 2) {
        est.cf_prefix = common_cf_prefix(cfs[0], cfs[1]);
        if (cfs.size() == 3) est.cf_prefix = common_cf_prefix(est.cf_prefix, cfs[2]);
    }
    return est;
}

// Walks the alternating geodesic around an imaginary region (slot 1 or 2)
// until some real-region trace satisfies |z| < 2, the values escape, or the
// walk limit is hit.  For slot 2 (trace y) the recursion is
//     x_{n+1} = y z_n - x_n,   z_{n+1} = -y x_{n+1} - z_n,
// which preserves z^2 + y x z - x^2; slot 1 is symmetric.
template <class S>
std::optional<std::pair<long, S>> elliptic_walk(const ImaginaryCharacter<S>& c,
                                                int imaginary_slot, const Budget& budget,
                                                MoveWord* steps_out = nullptr,
                                                bool reverse = false) {
    using sc = scalar<S>;
    budget.validate();
    if (imaginary_slot != 1 && imaginary_slot != 2)
        throw std::invalid_argument("elliptic_walk: slot must be 1 (X) or 2 (Y)");
    const S& around = imaginary_slot == 1 ? c.x : c.y;
    if (sc::is_zero(around))
        throw std::invalid_argument("elliptic_walk: region trace is zero (exceptional character)");
    const int other = imaginary_slot == 1 ? 2 : 1;

    S a = detail::coord(c, other);  // moving imaginary coordinate
    S z = c.z;
    S prev_az = sc::abs(z), prev_aa = sc::abs(a);
    long escape_streak = 0;
    for (long n = 1; n <= budget.geodesic_walk_limit; ++n) {
        // one full step around the region; `reverse` walks the geodesic the
        // other way (the two half-flips in the opposite order)
        if (!reverse) {
            a = around * z - a;
            z = -around * a - z;
        } else {
            z = -around * a - z;
            a = around * z - a;
        }
        if (steps_out) {
            if (!reverse) {
                steps_out->push_back(vieta_of_color(other));
                steps_out->push_back(vieta_of_color(3));
            } else {
                steps_out->push_back(vieta_of_color(3));
                steps_out->push_back(vieta_of_color(other));
            }
        }
        if (!sc::is_finite(z) || !sc::is_finite(a)) return std::nullopt;
        S az = sc::abs(z), aa = sc::abs(a);
        if (az < S(2)) return std::make_pair(n, z);
        // both values past 2 and non-decreasing twice: the lattice escapes
        if (az >= prev_az && aa >= prev_aa && az > S(2) && aa > S(2)) {
            if (++escape_streak >= 2) return std::nullopt;
        } else {
            escape_streak = 0;
        }
        if (sc::to_double(az) > budget.max_abs || sc::to_double(aa) > budget.max_abs)
            return std::nullopt;
        prev_az = std::move(az);
        prev_aa = std::move(aa);
    }
    return std::nullopt;
}

namespace detail {

// Sign-change normalization for a C_{0,2} sink: the two boundary traces of a
// k < 2 sink share a sign; flip it to negative when needed.  Appends the
// sign-change to the word so the word still maps the input to the output.
template <class S>
void normalize_c02_sink(ImaginaryCharacter<S>& c, MoveWord& word) {
    if (c.z > S(0)) {
        c = apply(c, Generator::S1);
        word.push_back(Generator::S1);
    }
}

template <class S>
Classification<S> classify_impl(const ImaginaryCharacter<S>& input, const Budget& budget) {
    using sc = scalar<S>;
    budget.validate();
    if (!sc::is_finite(input.x) || !sc::is_finite(input.y) || !sc::is_finite(input.z))
        throw std::invalid_argument("classify: non-finite character");

    const S k = kappa(input);
    const bool k_below_2 = k < S(2);
    ImaginaryCharacter<S> c = input;
    MoveWord word;

    // kappa is invariant, so the reducible test is a property of the level
    // and is decided once; along the descent only zero coordinates can
    // newly except a vertex.
    if (auto exc = exceptional_kind(input)) return ExceptionalResult{*exc};

    auto finish_elliptic = [&](S trace) -> Classification<S> {
        auto fr = replay_fractions(word);
        return EllipticPrimitiveResult<S>{fr[2], std::move(trace), word};
    };

    for (int depth = 0;; ++depth) {
        if (sc::is_zero(c.x) || sc::is_zero(c.y)) {
            bool both = sc::is_zero(c.x) && sc::is_zero(c.y);
            return ExceptionalResult{both ? ExceptionalKind::Dihedral
                                          : ExceptionalKind::CoordinateZero};
        }
        if (k_below_2 && sc::abs(c.z) < S(2)) return finish_elliptic(c.z);

        if (depth >= budget.max_depth) {
            // Budget exhausted.  If an imaginary coordinate is small the
            // descent is crawling around one region; a bounded lattice walk
            // realizes the elliptic-existence argument directly.
            if (k_below_2) {
                int slot = sc::less_abs(c.x, c.y) ? 1 : 2;
                for (bool reverse : {false, true}) {
                    MoveWord walk_steps;
                    if (auto hit = elliptic_walk(c, slot, budget, &walk_steps, reverse)) {
                        c = apply_word(c, walk_steps);
                        word.insert(word.end(), walk_steps.begin(), walk_steps.end());
                        return finish_elliptic(hit->second);
                    }
                }
            }
            UndeterminedResult u{depth, {}, word};
            if (auto est = end_invariant_estimate(word)) u.end_estimate = *est;
            return u;
        }

        auto flips = flips_of(c);
        int best = 0, indecisive_color = 0;
        S best_drop{};
        for (int color = 1; color <= 3; ++color) {
            const S& cur = coord(c, color);
            const S& f = flips[static_cast<std::size_t>(color - 1)];
            if (sc::eq_abs(f, cur)) {
                if (indecisive_color == 0) indecisive_color = color;
                continue;
            }
            if (!sc::less_abs(f, cur)) continue;
            S drop = sc::abs(cur) - sc::abs(f);
            if (best == 0 || drop > best_drop) {
                best = color;
                best_drop = drop;
            }
        }

        if (best != 0) {  // strictly-outward edge: descend
            set_coord(c, best, std::move(flips[static_cast<std::size_t>(best - 1)]));
            word.push_back(vieta_of_color(best));
            continue;
        }

        // No strictly-outward edge: the vertex is terminal.
        auto stall_undetermined = [&]() -> Classification<S> {
            // a tolerance tie stopped a descent that exact arithmetic would
            // continue (the orbit crawls toward the exceptional web)
            UndeterminedResult u{depth, {}, word};
            if (auto est = end_invariant_estimate(word)) u.end_estimate = *est;
            return u;
        };

        if (k_below_2) {
            // |z| >= 2 here.  Every exact stall lands in the C_{0,2} Fricke
            // set after sign normalization (an indecisive R-edge has z' = z,
            // so both endpoints carry the same structure); a non-member
            // stall is a float-tolerance crawl.
            ImaginaryCharacter<S> sink = c;
            MoveWord w = word;
            normalize_c02_sink(sink, w);
            auto [bz, bzp] = boundary_traces_c02(sink);
            bool member = (bz <= S(-2) || sc::eq(bz, S(-2))) &&
                          (bzp <= S(-2) || sc::eq(bzp, S(-2)));
            if (member) return FrickeC02Result<S>{std::move(sink), std::move(w)};
            if (indecisive_color != 0) return stall_undetermined();
            throw std::logic_error("classify: k<2 sink outside the C_{0,2} Fricke set");
        }

        // k >= 2 (k == 2 was short-circuited as Reducible).
        if (indecisive_color != 0) {
            ImaginaryCharacter<S> other = apply(c, vieta_of_color(indecisive_color));
            // a genuine attracting indecisive edge joins two generalized
            // Fricke structures (orthogonal one- and two-sided geodesics)
            if (in_generalized_fricke_c11(c) || in_generalized_fricke_c11(other))
                return AttractingIndecisiveEdgeResult<S>{c, std::move(other), indecisive_color,
                                                         word};
            return stall_undetermined();
        }
        auto membership = in_generalized_fricke_c11(c);
        bool window = c.z * c.z < k + S(2) || sc::eq(c.z * c.z, k + S(2));
        if (!membership || !window)
            throw std::logic_error(
                "classify: k>2 sink violates generalized Fricke membership");
        S delta = boundary_trace_c11(c);
        return GeneralizedFrickeC11Result<S>{c, *membership, std::move(delta), word};
    }
}

}  // namespace detail

template <class S>
Classification<S> classify(const ImaginaryCharacter<S>& c, const Budget& budget = {}) {
    return detail::classify_impl(c, budget);
}

template <class S>
const MoveWord* classification_word(const Classification<S>& c) {
    if (auto* g = std::get_if<GeneralizedFrickeC11Result<S>>(&c)) return &g->word;
    if (auto* f = std::get_if<FrickeC02Result<S>>(&c)) return &f->word;
    if (auto* a = std::get_if<AttractingIndecisiveEdgeResult<S>>(&c)) return &a->word;
    if (auto* e = std::get_if<EllipticPrimitiveResult<S>>(&c)) return &e->word;
    return nullptr;
}

template <class S>
struct BqWitness {
    Fraction fraction;
    RegionParity parity;
    S trace;
};

template <class S>
struct BqReport {
    bool satisfied = false;
    long omega_size = 0;  // regions with |trace| <= C found (partial if exhausted)
    std::optional<BqWitness<S>> witness;
    bool budget_exhausted = false;
};

namespace detail {

// A region on the enumeration queue: its fraction (identity), trace, and a
// vertex on its boundary geodesic, given as character plus the slot the
// region occupies there.
template <class S>
struct RegionSite {
    Fraction fraction;
    S trace;
    ImaginaryCharacter<S> at;
    std::array<Fraction, 3> labels;
    int slot;
};

}  // namespace detail

// Breadth-first enumeration of the regions with |trace| <= C, starting from
// the attractor found by the descent and expanding region by region along
// boundary geodesics (the set of small regions is connected for C >= 2).
// A witness is any real region with trace in [-2, 2] or any imaginary
// region with trace 0.
template <class S>
BqReport<S> bq_check(const ImaginaryCharacter<S>& input, const S& C, const Budget& budget = {}) {
    using sc = scalar<S>;
    budget.validate();
    if (C < S(2)) throw std::invalid_argument("bq_check: requires C >= 2");

    BqReport<S> report;
    std::set<Fraction> seen;
    std::vector<detail::RegionSite<S>> queue;

    auto is_witness = [&](const Fraction& fr, const S& trace) {
        if (parity_of(fr) == RegionParity::RealRegion)
            return sc::abs(trace) <= S(2) || sc::eq_abs(trace, S(2));
        return sc::is_zero(trace);
    };
    // Returns true (and short-circuits the caller) when a witness is found.
    auto offer = [&](const Fraction& fr, const S& trace, const ImaginaryCharacter<S>& at,
                     const std::array<Fraction, 3>& labels, int slot) -> bool {
        if (!seen.insert(fr).second) return false;
        if (is_witness(fr, trace)) {
            report.witness = BqWitness<S>{fr, parity_of(fr), trace};
            return true;
        }
        if (sc::abs(trace) <= C) {
            ++report.omega_size;
            queue.push_back(detail::RegionSite<S>{fr, trace, at, labels, slot});
        }
        return false;
    };

    // Descend to the attractor first; the small-trace regions cluster there.
    ImaginaryCharacter<S> c = input;
    {
        Budget descent = budget;
        for (int depth = 0; depth < descent.max_depth; ++depth) {
            auto flips = detail::flips_of(c);
            int best = 0;
            S best_drop{};
            for (int color = 1; color <= 3; ++color) {
                const S& cur = detail::coord(c, color);
                const S& f = flips[static_cast<std::size_t>(color - 1)];
                if (sc::eq_abs(f, cur) || !sc::less_abs(f, cur)) continue;
                S drop = sc::abs(cur) - sc::abs(f);
                if (best == 0 || drop > best_drop) {
                    best = color;
                    best_drop = drop;
                }
            }
            if (best == 0) break;
            detail::set_coord(c, best, std::move(flips[static_cast<std::size_t>(best - 1)]));
        }
    }

    std::array<Fraction, 3> base{Fraction::make(1, 0), Fraction::make(0, 1),
                                 Fraction::make(1, 1)};
    for (int slot = 1; slot <= 3; ++slot) {
        if (offer(base[static_cast<std::size_t>(slot - 1)], detail::coord(c, slot), c, base,
                  slot)) {
            return report;  // witness at the attractor itself
        }
    }

    long walked_total = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        auto site = queue[qi];  // copy: queue may reallocate
        // Walk the boundary geodesic of site.fraction in both directions.
        // Around slot s the two other slots flip alternately; each vertex on
        // the way reveals one new region (the freshly flipped slot) and one
        // opposite region (flipping slot s itself).
        for (int dir = 0; dir < 2; ++dir) {
            ImaginaryCharacter<S> cur = site.at;
            std::array<Fraction, 3> labels = site.labels;
            int first = site.slot % 3 + 1, second = (site.slot + 1) % 3 + 1;
            int next_color = dir == 0 ? first : second;
            S prev1 = sc::abs(detail::coord(cur, first));
            S prev2 = sc::abs(detail::coord(cur, second));
            long grown = 0;
            for (long n = 0; n < budget.geodesic_walk_limit; ++n) {
                if (++walked_total > budget.geodesic_walk_limit * 8 ||
                    report.omega_size > static_cast<long>(budget.max_depth)) {
                    report.budget_exhausted = true;
                    return report;
                }
                // Opposite region across the slot edge at this vertex.
                {
                    auto flips = detail::flips_of(cur);
                    int a = site.slot % 3 + 1, b = (site.slot + 1) % 3 + 1;
                    Fraction opp = farey_flip(labels[static_cast<std::size_t>(a - 1)],
                                              labels[static_cast<std::size_t>(b - 1)],
                                              labels[static_cast<std::size_t>(site.slot - 1)]);
                    ImaginaryCharacter<S> oc = cur;
                    detail::set_coord(oc, site.slot,
                                      S(flips[static_cast<std::size_t>(site.slot - 1)]));
                    std::array<Fraction, 3> ol = labels;
                    ol[static_cast<std::size_t>(site.slot - 1)] = opp;
                    if (offer(opp, detail::coord(oc, site.slot), oc, ol, site.slot)) return report;
                }
                // Step along the geodesic: flip next_color.
                auto flips = detail::flips_of(cur);
                S flipped = flips[static_cast<std::size_t>(next_color - 1)];
                int a = next_color % 3 + 1, b = (next_color + 1) % 3 + 1;
                Fraction nf = farey_flip(labels[static_cast<std::size_t>(a - 1)],
                                         labels[static_cast<std::size_t>(b - 1)],
                                         labels[static_cast<std::size_t>(next_color - 1)]);
                detail::set_coord(cur, next_color, std::move(flipped));
                labels[static_cast<std::size_t>(next_color - 1)] = nf;
                if (offer(nf, detail::coord(cur, next_color), cur, labels, next_color))
                    return report;
                if (sc::to_double(sc::abs(detail::coord(cur, next_color))) > budget.max_abs)
                    break;
                // Escape detection: both walking slots past C and
                // non-decreasing for a few reveals.
                S n1 = sc::abs(detail::coord(cur, first)), n2 = sc::abs(detail::coord(cur, second));
                if (n1 > C && n2 > C && n1 >= prev1 && n2 >= prev2) {
                    if (++grown >= 3) break;
                } else {
                    grown = 0;
                }
                prev1 = std::move(n1);
                prev2 = std::move(n2);
                next_color = next_color == first ? second : first;
            }
        }
    }
    report.satisfied = !report.witness && !report.budget_exhausted;
    return report;
}

}  // namespace imchar
