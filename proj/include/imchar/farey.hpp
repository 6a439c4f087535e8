#pragma once

// Primitive integer pairs [p : q] up to sign, the mod-2 parity trichotomy,
// and reflection across a Farey edge.  These label the complementary
// regions of the trivalent tree: a Farey triangle is a triple of classes
// with pairwise |p_i q_j - p_j q_i| = 1.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace imchar {

enum class RegionParity : std::uint8_t { RealRegion, ImaginaryRegionX, ImaginaryRegionY };

struct Fraction {
    mpz_class p, q;

    // Canonical representative: q > 0, or p > 0 when q = 0; gcd(|p|,|q|) = 1.
    static Fraction make(mpz_class p, mpz_class q) {
        if (sgn(p) == 0 && sgn(q) == 0) throw std::invalid_argument("fraction: (0,0)");
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        p /= g;
        q /= g;
        if (sgn(q) < 0 || (sgn(q) == 0 && sgn(p) < 0)) {
            p = -p;
            q = -q;
        }
        return Fraction{std::move(p), std::move(q)};
    }

    static Fraction make(long p, long q) { return make(mpz_class(p), mpz_class(q)); }

    bool is_infinity() const { return sgn(q) == 0; }

    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.p == b.p && a.q == b.q;
    }
    friend bool operator<(const Fraction& a, const Fraction& b) {
        if (int c = cmp(a.p, b.p); c != 0) return c < 0;
        return a.q < b.q;
    }

    std::string str() const { return p.get_str() + "/" + q.get_str(); }
};

// Parity classes: (odd, odd) is the real (orientation-preserving) class;
// (odd, even) and (even, odd) are the two imaginary classes.
inline RegionParity parity_of(const Fraction& f) {
    bool po = mpz_odd_p(f.p.get_mpz_t()), qo = mpz_odd_p(f.q.get_mpz_t());
    if (po && qo) return RegionParity::RealRegion;
    if (po) return RegionParity::ImaginaryRegionX;
    return RegionParity::ImaginaryRegionY;
}

inline bool unimodular(const Fraction& a, const Fraction& b) {
    mpz_class det = a.p * b.q - b.p * a.q;
    return det == 1 || det == -1;
}

// The two classes adjacent to both u and v are [u+v] and [u-v]; the flip
// replaces `old_f` (one of them) by the other.  Projectively this is the
// reflection w' = 2u - w across the Farey edge (u, v).
inline Fraction farey_flip(const Fraction& u, const Fraction& v, const Fraction& old_f) {
    Fraction sum = Fraction::make(u.p + v.p, u.q + v.q);
    Fraction diff = Fraction::make(u.p - v.p, u.q - v.q);
    if (old_f == sum) return diff;
    if (old_f == diff) return sum;
    throw std::logic_error("farey_flip: old fraction is not adjacent to the kept pair");
}

// Continued fraction of p/q (q > 0), floor convention: p/q = a0 + 1/(a1 + ...)
// with a_i >= 1 for i >= 1.
inline std::vector<long> continued_fraction(const Fraction& f, std::size_t max_terms = 64) {
    if (f.is_infinity()) return {};
    std::vector<long> cf;
    mpz_class num = f.p, den = f.q;
    while (sgn(den) != 0 && cf.size() < max_terms) {
        mpz_class fl, rem;
        mpz_fdiv_qr(fl.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        cf.push_back(fl.get_si());
        num = den;
        den = rem;
    }
    return cf;
}

inline std::vector<long> common_cf_prefix(const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> out;
    for (std::size_t i = 0; i < a.size() && i < b.size() && a[i] == b[i]; ++i)
        out.push_back(a[i]);
    return out;
}

}  // namespace imchar
