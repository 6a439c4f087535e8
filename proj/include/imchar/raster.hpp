#pragma once

// Deterministic parallel rasterization of the classification over windows
// of the xy-plane on a chosen sheet.  Pixels are sampled at cell centers,
// scanlines are partitioned over threads into preallocated rows, and the
// image is a pure function of the job: thread count never changes a byte.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "classify.hpp"
#include "surface.hpp"

namespace imchar {

enum class Coloring : std::uint8_t { ByVariant, ByEndEstimate, ByDepth };

struct RasterJob {
    double k;
    Sheet sheet = Sheet::Plus;
    Window window;
    Budget budget;
    Coloring coloring = Coloring::ByVariant;
};

struct Rgb {
    std::uint8_t r, g, b;
};

// Fixed 16-color palette.  0 void; 1..8 keyed by classification variant;
// 9..15 sequential ramp used by depth buckets and end-estimate hashing.
inline const std::array<Rgb, 16>& palette() {
    static const std::array<Rgb, 16> p = {{
        {0, 0, 0},        // 0 void (no preimage)
        {230, 159, 0},    // 1 GeneralizedFrickeC11
        {0, 114, 178},    // 2 FrickeC02
        {204, 121, 167},  // 3 AttractingIndecisiveEdge
        {0, 158, 115},    // 4 EllipticPrimitive
        {213, 94, 0},     // 5 Exceptional: Reducible
        {86, 180, 233},   // 6 Exceptional: CoordinateZero
        {240, 228, 66},   // 7 Exceptional: Dihedral
        {128, 128, 128},  // 8 Undetermined
        {36, 36, 64},     // 9..15 ramp
        {64, 52, 96},
        {96, 72, 128},
        {128, 96, 160},
        {160, 124, 192},
        {192, 156, 224},
        {224, 192, 255},
    }};
    return p;
}

inline int variant_palette_index(ClassVariant v, ExceptionalKind kind = ExceptionalKind::Reducible) {
    switch (v) {
        case ClassVariant::GeneralizedFrickeC11: return 1;
        case ClassVariant::FrickeC02: return 2;
        case ClassVariant::AttractingIndecisiveEdge: return 3;
        case ClassVariant::EllipticPrimitive: return 4;
        case ClassVariant::Exceptional:
            switch (kind) {
                case ExceptionalKind::Reducible: return 5;
                case ExceptionalKind::CoordinateZero: return 6;
                case ExceptionalKind::Dihedral: return 7;
            }
            return 5;
        case ClassVariant::Undetermined: return 8;
    }
    return 8;
}

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Rgb pixel(int i, int j) const {
        std::size_t off = 3 * (static_cast<std::size_t>(i) * width + j);
        return {rgb[off], rgb[off + 1], rgb[off + 2]};
    }
};

// Binary PPM (P6, maxval 255).
inline void write_ppm(const Image& img, std::ostream& os) {
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()),
             static_cast<std::streamsize>(img.rgb.size()));
}

namespace detail {

struct PixelOutcome {
    std::int8_t palette = 0;  // 0 = void
    std::int8_t variant = -1;  // ClassVariant index, -1 = void
    std::int32_t depth = 0;
    bool fricke = false;  // GeneralizedFrickeC11 for gap scans
};

inline PixelOutcome classify_pixel(const RasterJob& job, double x, double y) {
    auto z = z_sheet(job.k, x, y, job.sheet);
    if (!z) return {};
    ImaginaryCharacter<double> c{x, y, *z};
    Classification<double> cls = classify(c, job.budget);
    PixelOutcome out;
    ExceptionalKind kind = ExceptionalKind::Reducible;
    if (auto* e = std::get_if<ExceptionalResult>(&cls)) kind = e->kind;
    ClassVariant v = variant_of(cls);
    out.variant = static_cast<std::int8_t>(v);
    out.fricke = v == ClassVariant::GeneralizedFrickeC11;
    if (const MoveWord* w = classification_word(cls))
        out.depth = static_cast<std::int32_t>(w->size());
    else if (auto* u = std::get_if<UndeterminedResult>(&cls))
        out.depth = u->depth_reached;

    switch (job.coloring) {
        case Coloring::ByVariant:
            out.palette = static_cast<std::int8_t>(variant_palette_index(v, kind));
            break;
        case Coloring::ByDepth: {
            int d = out.depth;
            int bucket = d <= 0 ? 0 : d <= 1 ? 1 : d <= 2 ? 2 : d <= 4 ? 3 : d <= 8 ? 4
                         : d <= 16 ? 5 : 6;
            out.palette = static_cast<std::int8_t>(9 + bucket);
            break;
        }
        case Coloring::ByEndEstimate: {
            if (auto* u = std::get_if<UndeterminedResult>(&cls)) {
                std::uint64_t h = 1469598103934665603ull;
                auto mix = [&](std::uint64_t v64) {
                    h ^= v64;
                    h *= 1099511628211ull;
                };
                if (u->end_estimate.rational) {
                    mix(u->end_estimate.rational->p.get_si());
                    mix(u->end_estimate.rational->q.get_si());
                } else {
                    for (long t : u->end_estimate.cf_prefix) mix(static_cast<std::uint64_t>(t));
                }
                out.palette = static_cast<std::int8_t>(9 + h % 7);
            } else {
                out.palette = static_cast<std::int8_t>(variant_palette_index(v, kind));
            }
            break;
        }
    }
    return out;
}

inline std::vector<PixelOutcome> classify_grid(const RasterJob& job, int threads) {
    job.window.validate();
    job.budget.validate();
    const Window& w = job.window;
    std::vector<PixelOutcome> grid(static_cast<std::size_t>(w.nx) * w.ny);
    parallel_rows(w.ny, threads, [&](int i) {
        const double y = w.cell_y(i);
        for (int j = 0; j < w.nx; ++j)
            grid[static_cast<std::size_t>(i) * w.nx + j] = classify_pixel(job, w.cell_x(j), y);
    });
    return grid;
}

}  // namespace detail

struct RenderOutput {
    Image image;
    std::vector<detail::PixelOutcome> grid;  // row-major, for stats / CSV dumps
};

inline RenderOutput render_full(const RasterJob& job, int threads = 1) {
    RenderOutput out;
    out.grid = detail::classify_grid(job, threads);
    const Window& w = job.window;
    out.image.width = w.nx;
    out.image.height = w.ny;
    out.image.rgb.assign(static_cast<std::size_t>(w.nx) * w.ny * 3, 0);
    for (std::size_t p = 0; p < out.grid.size(); ++p) {
        Rgb c = palette()[static_cast<std::size_t>(out.grid[p].palette)];
        out.image.rgb[3 * p] = c.r;
        out.image.rgb[3 * p + 1] = c.g;
        out.image.rgb[3 * p + 2] = c.b;
    }
    return out;
}

inline Image render(const RasterJob& job, int threads = 1) {
    return render_full(job, threads).image;
}

struct DensityScan {
    double bowditch_fraction;  // Fricke pixels among non-void pixels
    int max_gap_pixels;        // max Chebyshev distance from non-Fricke to Fricke
};

// Desk-scale density check: the complement of the Bowditch set has empty
// interior, so on a pixel grid every non-Fricke, non-void pixel should have
// a Fricke pixel within a small Chebyshev distance.
inline DensityScan density_scan(const RasterJob& job, int threads = 1) {
    if (!(job.k > 2.0)) throw std::domain_error("density_scan: requires k > 2");
    auto grid = detail::classify_grid(job, threads);
    const int nx = job.window.nx, ny = job.window.ny;

    long nonvoid = 0, fricke = 0;
    std::vector<std::int32_t> dist(grid.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (grid[p].palette != 0) ++nonvoid;
        if (grid[p].fricke) {
            ++fricke;
            dist[p] = 0;
            queue.push_back(p);
        }
    }
    if (nonvoid == 0) throw std::domain_error("density_scan: all-void window");
    if (fricke == 0)
        return {0.0, std::max(nx, ny)};  // degenerate: no Fricke pixel at all

    // Multi-source BFS over the 8-neighborhood computes Chebyshev distances.
    while (!queue.empty()) {
        std::size_t p = queue.front();
        queue.pop_front();
        int i = static_cast<int>(p) / nx, j = static_cast<int>(p) % nx;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= ny || jj < 0 || jj >= nx) continue;
                std::size_t q = static_cast<std::size_t>(ii) * nx + jj;
                if (dist[q] < 0) {
                    dist[q] = dist[p] + 1;
                    queue.push_back(q);
                }
            }
    }
    int max_gap = 0;
    for (std::size_t p = 0; p < grid.size(); ++p)
        if (grid[p].palette != 0 && !grid[p].fricke) max_gap = std::max(max_gap, int(dist[p]));
    return {double(fricke) / double(nonvoid), max_gap};
}

// Rational parametrization of the k = 2 level set; lands on the Minus sheet.
inline ImaginaryCharacter<double> psi(double a, double b) {
    return {2.0 * std::sinh(a / 2.0), 2.0 * std::sinh(b / 2.0), -2.0 * std::cosh((a + b) / 2.0)};
}

struct RegionMeasure {
    double value;
    double refined;
    double error_estimate;
    int nx, ny;
};

// Quadrature of the invariant area form over the pixels whose classification
// matches the filter, with a resolution-doubling error estimate.
inline RegionMeasure measure_region(double k, Sheet sheet, const Window& window,
                                    ClassVariant filter, const Budget& budget, int threads = 1) {
    auto pred = [&](const ImaginaryCharacter<double>& c) {
        return variant_of(classify(c, budget)) == filter;
    };
    auto rep = measure_refined(k, sheet, window, pred, threads);
    return {rep.value, rep.refined, rep.error_estimate, rep.nx, rep.ny};
}

}  // namespace imchar
