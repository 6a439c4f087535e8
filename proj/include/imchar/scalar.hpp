#pragma once

// Dual-mode arithmetic for the character dynamics: exact big rationals
// (GMP mpq) when inputs are rational, IEEE doubles otherwise.  Orbit
// coordinates grow doubly exponentially, so deep descents on integer
// seeds are only trustworthy in exact mode.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace imchar {

using Rat = mpq_class;

// All float-mode equality tests are relative to scale max(1,|a|,|b|).
inline constexpr double kRelTol = 1e-9;

template <class S>
struct scalar;

template <>
struct scalar<double> {
    static constexpr bool exact = false;

    static double abs(double a) { return std::fabs(a); }
    static bool is_zero(double a) { return a == 0.0; }
    static bool is_finite(double a) { return std::isfinite(a); }
    static double to_double(double a) { return a; }
    static double from_int(long v) { return static_cast<double>(v); }

    static bool eq(double a, double b) {
        return std::fabs(a - b) <= kRelTol * std::max({1.0, std::fabs(a), std::fabs(b)});
    }
    // |a| vs |b| within the same tolerance; ties are what make an edge indecisive.
    static bool eq_abs(double a, double b) { return eq(std::fabs(a), std::fabs(b)); }
    static bool less_abs(double a, double b) { return std::fabs(a) < std::fabs(b); }
};

template <>
struct scalar<Rat> {
    static constexpr bool exact = true;

    static Rat abs(const Rat& a) { return ::abs(a); }
    static bool is_zero(const Rat& a) { return sgn(a) == 0; }
    static bool is_finite(const Rat&) { return true; }
    static double to_double(const Rat& a) { return a.get_d(); }
    static Rat from_int(long v) { return Rat(v); }

    static bool eq(const Rat& a, const Rat& b) { return a == b; }
    static bool eq_abs(const Rat& a, const Rat& b) { return ::abs(a) == ::abs(b); }
    static bool less_abs(const Rat& a, const Rat& b) { return ::abs(a) < ::abs(b); }
};

// Parses a rational literal: "3", "-7/2", "1.25".  Anything else (sqrt10,
// 1e-3, ...) is rejected; exact mode accepts rational literals only.
inline Rat parse_rational(std::string_view text) {
    auto fail = [&] {
        throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
    };
    if (text.empty()) fail();
    std::string s(text);
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) fail();
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0 || digits.empty()) fail();
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (std::isdigit(static_cast<unsigned char>(digits[i]))) continue;
            if (i == 0 && (digits[i] == '-' || digits[i] == '+')) continue;
            fail();
        }
        mpz_class num;
        if (num.set_str(digits, 10) != 0) fail();
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rat r(num, den);
        r.canonicalize();
        return r;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '/') continue;
        if (i == 0 && (c == '-' || c == '+')) continue;
        fail();
    }
    Rat r;
    if (r.set_str(s, 10) != 0) fail();
    if (r.get_den() == 0) fail();
    r.canonicalize();
    return r;
}

inline std::string rational_to_string(const Rat& r) { return r.get_str(); }

}  // namespace imchar
