#pragma once

// Geometry of the level surfaces kappa^-1(k): sheet functions, topology,
// the invariant area form 1/sqrt(D) dx dy, Poisson/Hamiltonian fields and
// window quadrature.
//
// For k > -2 the level set is the disjoint union of the graphs of
//     z_pm(x, y) = (-xy +- sqrt(D)) / 2,   D = (x^2+4)(y^2+4) + 4(k-2),
// and the projection to the xy-plane is a diffeomorphism on each sheet.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "character.hpp"

namespace imchar {

enum class Sheet : std::uint8_t { Plus, Minus };

enum class LevelTopology : std::uint8_t { TwoSheets, ConeSingular, Cylinder };

struct Window {
    double x_min, x_max, y_min, y_max;
    int nx, ny;  // grid resolution

    void validate() const {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw std::invalid_argument("window: need x_min < x_max and y_min < y_max");
        if (nx < 1 || ny < 1) throw std::invalid_argument("window: resolution must be >= 1x1");
    }
    double dx() const { return (x_max - x_min) / nx; }
    double dy() const { return (y_max - y_min) / ny; }
    double cell_x(int j) const { return x_min + (j + 0.5) * dx(); }
    double cell_y(int i) const { return y_min + (i + 0.5) * dy(); }
};

inline double discriminant(double k, double x, double y) {
    return (x * x + 4.0) * (y * y + 4.0) + 4.0 * (k - 2.0);
}

inline bool projection_has_preimage(double k, double x, double y) {
    return discriminant(k, x, y) >= 0.0;
}

inline std::optional<double> z_sheet(double k, double x, double y, Sheet s) {
    double d = discriminant(k, x, y);
    if (d < 0.0) return std::nullopt;
    double r = std::sqrt(d);
    return s == Sheet::Plus ? (-x * y + r) / 2.0 : (-x * y - r) / 2.0;
}

template <class S>
S q_z(const S& z, const S& x, const S& y) {
    return x * x - z * x * y + y * y;
}

// Gradient of kappa: (-2x + yz, -2y + zx, 2z + xy).
template <class S>
std::array<S, 3> grad_kappa(const ImaginaryCharacter<S>& c) {
    return {S(-2) * c.x + c.y * c.z, S(-2) * c.y + c.z * c.x, S(2) * c.z + c.x * c.y};
}

inline LevelTopology level_topology(double k) {
    if (k > -2.0) return LevelTopology::TwoSheets;
    if (k == -2.0) return LevelTopology::ConeSingular;
    return LevelTopology::Cylinder;
}

// Density of the invariant area form in sheet coordinates.  The sign(z)
// factor is absorbed into the sheet choice, so the density is positive.
inline double area_density(double k, double x, double y) {
    double d = discriminant(k, x, y);
    if (d <= 0.0) throw std::domain_error("area_density: discriminant <= 0");
    return 1.0 / std::sqrt(d);
}

// Coefficients of the restricted Poisson bivector:
// (2z + xy) dx^dy + (-2x + yz) dy^dz + (-2y + zx) dz^dx.
template <class S>
std::array<S, 3> poisson_bivector(const ImaginaryCharacter<S>& c) {
    return {S(2) * c.z + c.x * c.y, S(-2) * c.x + c.y * c.z, S(-2) * c.y + c.z * c.x};
}

enum class HamWhich : std::uint8_t { X, Y, Z, ZPrime };

// Hamiltonian vector fields of the coordinate traces and of z' = -xy - z,
// as displayed in the source calculations (the z' field carries the
// opposite overall sign convention; either sign is tangent to the level set).
template <class S>
std::array<S, 3> ham_field(const ImaginaryCharacter<S>& c, HamWhich which) {
    const S &x = c.x, &y = c.y, &z = c.z;
    switch (which) {
        case HamWhich::X:
            return {S(0), -(S(2) * z + x * y), x * z - S(2) * y};
        case HamWhich::Y:
            return {S(2) * z + x * y, S(0), S(2) * x - y * z};
        case HamWhich::Z:
            return {S(2) * y - x * z, y * z - S(2) * x, S(0)};
        case HamWhich::ZPrime:
            return {z * x + (x * x + S(2)) * y, -(z * y + (y * y + S(2)) * x),
                    S(2) * (x * x - y * y)};
    }
    throw std::logic_error("unreachable");
}

// Slopes of the lines y = m*x bounding the generalized Fricke sector in the
// plane z = sqrt(k+2); the product m_plus * m_minus is identically 1.
inline std::pair<double, double> slopes(double k) {
    if (k < 2.0) throw std::domain_error("slopes: requires k >= 2");
    double a = std::sqrt(k + 2.0), b = std::sqrt(k - 2.0);
    return {(a + b) / 2.0, (a - b) / 2.0};
}

namespace detail {

// Fixed-order pairwise reduction; deterministic and well conditioned.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double t : v) s += t;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

// Runs fn(row) for each row in [0, ny); rows are interleaved over threads.
// Each row owns disjoint output, so scheduling cannot change any result.
template <class Fn>
void parallel_rows(int ny, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, ny));
    if (threads == 1) {
        for (int i = 0; i < ny; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < ny; i += threads) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Midpoint quadrature of the invariant area form over the window cells on
// sheet s, restricted to cells whose character satisfies the predicate.
// Throws if some cell center has no preimage on the sheet.
template <class Pred>
double measure(double k, Sheet s, const Window& w, Pred&& pred, int threads = 1) {
    w.validate();
    const double cell = w.dx() * w.dy();
    std::vector<double> row_sums(static_cast<std::size_t>(w.ny), 0.0);
    std::vector<std::uint8_t> row_bad(static_cast<std::size_t>(w.ny), 0);
    detail::parallel_rows(w.ny, threads, [&](int i) {
        const double y = w.cell_y(i);
        std::vector<double> cells;
        cells.reserve(static_cast<std::size_t>(w.nx));
        for (int j = 0; j < w.nx; ++j) {
            const double x = w.cell_x(j);
            auto z = z_sheet(k, x, y, s);
            if (!z) {
                row_bad[static_cast<std::size_t>(i)] = 1;
                return;
            }
            ImaginaryCharacter<double> c{x, y, *z};
            cells.push_back(pred(c) ? area_density(k, x, y) * cell : 0.0);
        }
        row_sums[static_cast<std::size_t>(i)] = detail::pairwise_sum(cells);
    });
    for (auto b : row_bad)
        if (b) throw std::domain_error("measure: window point without preimage on sheet");
    return detail::pairwise_sum(row_sums);
}

struct MeasureReport {
    double value;           // at the requested resolution
    double refined;         // at doubled resolution
    double error_estimate;  // |value - refined|
    int nx, ny;
};

template <class Pred>
MeasureReport measure_refined(double k, Sheet s, const Window& w, Pred&& pred, int threads = 1) {
    double coarse = measure(k, s, w, pred, threads);
    Window fine = w;
    fine.nx *= 2;
    fine.ny *= 2;
    double refined = measure(k, s, fine, pred, threads);
    return {coarse, refined, std::fabs(coarse - refined), w.nx, w.ny};
}

}  // namespace imchar
