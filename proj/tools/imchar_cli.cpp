// Command-line front door: classify points, run orbits and geodesics,
// render rasters, compute measures and level-set facts.  All results are
// machine-readable JSON on stdout (schema "v1"); diagnostics go to stderr.
// Exit codes: 0 success, 1 domain error, 2 flag error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "imchar/character.hpp"
#include "imchar/classify.hpp"
#include "imchar/jsonfmt.hpp"
#include "imchar/raster.hpp"
#include "imchar/surface.hpp"
#include "imchar/tree.hpp"

namespace {

using namespace imchar;

struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_double_flag(const std::string& text, const char* flag) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw FlagError(std::string(flag) + ": not a number: '" + text + "'");
    }
}

Rat parse_rat_flag(const std::string& text, const char* flag) {
    try {
        return parse_rational(text);
    } catch (const std::exception&) {
        throw FlagError(std::string(flag) +
                        ": exact mode accepts rational literals only (got '" + text + "')");
    }
}

Window parse_window_flag(const std::string& text, int res) {
    double v[4];
    char colon[3];
    std::istringstream is(text);
    if (!(is >> v[0] >> colon[0] >> v[1] >> colon[1] >> v[2] >> colon[2] >> v[3]) ||
        colon[0] != ':' || colon[1] != ':' || colon[2] != ':' || !(is >> std::ws).eof())
        throw FlagError("--window: expected x_min:x_max:y_min:y_max");
    Window w{v[0], v[1], v[2], v[3], res, res};
    try {
        w.validate();
    } catch (const std::invalid_argument& e) {
        throw FlagError(std::string("--window/--res: ") + e.what());
    }
    return w;
}

Sheet parse_sheet_flag(const std::string& s) {
    if (s == "plus") return Sheet::Plus;
    if (s == "minus") return Sheet::Minus;
    throw FlagError("--sheet: expected 'plus' or 'minus'");
}

const char* variant_name(ClassVariant v) {
    switch (v) {
        case ClassVariant::GeneralizedFrickeC11: return "GeneralizedFrickeC11";
        case ClassVariant::FrickeC02: return "FrickeC02";
        case ClassVariant::AttractingIndecisiveEdge: return "AttractingIndecisiveEdge";
        case ClassVariant::EllipticPrimitive: return "EllipticPrimitive";
        case ClassVariant::Exceptional: return "Exceptional";
        case ClassVariant::Undetermined: return "Undetermined";
    }
    return "?";
}

std::optional<ClassVariant> variant_from_name(const std::string& s) {
    for (int i = 0; i < 6; ++i) {
        auto v = static_cast<ClassVariant>(i);
        if (s == variant_name(v)) return v;
    }
    return std::nullopt;
}

const char* exceptional_name(ExceptionalKind k) {
    switch (k) {
        case ExceptionalKind::Reducible: return "Reducible";
        case ExceptionalKind::CoordinateZero: return "CoordinateZero";
        case ExceptionalKind::Dihedral: return "Dihedral";
    }
    return "?";
}

const char* boundary_name(BoundaryCase b) {
    switch (b) {
        case BoundaryCase::Geodesic: return "Geodesic";
        case BoundaryCase::Cusp: return "Cusp";
        case BoundaryCase::Cone: return "Cone";
    }
    return "?";
}

void emit_scalar(JsonWriter& j, double v) { j.value(v); }
void emit_scalar(JsonWriter& j, const Rat& v) { j.value(rational_to_string(v)); }

template <class S>
void emit_character(JsonWriter& j, const ImaginaryCharacter<S>& c) {
    j.begin_object();
    j.key("x");
    emit_scalar(j, c.x);
    j.key("y");
    emit_scalar(j, c.y);
    j.key("z");
    emit_scalar(j, c.z);
    j.end_object();
}

void emit_boundary(JsonWriter& j, const BoundaryKind& b) {
    j.begin_object();
    j.kv("kind", boundary_name(b.kind));
    j.kv("value", b.value);
    j.kv("delta", b.delta);
    j.end_object();
}

void emit_end_estimate(JsonWriter& j, const EndEstimate& e) {
    j.begin_object();
    if (e.rational) {
        j.kv("rational", e.rational->str());
    } else {
        j.key("cf_prefix");
        j.begin_array();
        for (long t : e.cf_prefix) j.value(t);
        j.end_array();
    }
    j.end_object();
}

template <class S>
void emit_classification(JsonWriter& j, const ImaginaryCharacter<S>& input,
                         const Classification<S>& cls) {
    j.begin_object();
    j.kv("schema", "v1");
    j.key("input");
    emit_character(j, input);
    j.key("kappa");
    emit_scalar(j, kappa(input));
    j.kv("variant", variant_name(variant_of(cls)));
    const MoveWord* word = classification_word(cls);
    if (auto* g = std::get_if<GeneralizedFrickeC11Result<S>>(&cls)) {
        j.key("sink");
        emit_character(j, g->sink);
        j.key("delta");
        emit_scalar(j, g->delta);
        j.key("boundary");
        emit_boundary(j, g->boundary);
    } else if (auto* f = std::get_if<FrickeC02Result<S>>(&cls)) {
        j.key("sink");
        emit_character(j, f->sink);
        auto [bz, bzp] = boundary_traces_c02(f->sink);
        j.key("boundary_traces");
        j.begin_array();
        emit_scalar(j, bz);
        emit_scalar(j, bzp);
        j.end_array();
    } else if (auto* a = std::get_if<AttractingIndecisiveEdgeResult<S>>(&cls)) {
        j.key("endpoints");
        j.begin_array();
        emit_character(j, a->a);
        emit_character(j, a->b);
        j.end_array();
        j.kv("color", a->color);
    } else if (auto* e = std::get_if<EllipticPrimitiveResult<S>>(&cls)) {
        j.kv("region_fraction", e->region_fraction.str());
        j.key("trace");
        emit_scalar(j, e->trace);
    } else if (auto* x = std::get_if<ExceptionalResult>(&cls)) {
        j.kv("kind", exceptional_name(x->kind));
    } else if (auto* u = std::get_if<UndeterminedResult>(&cls)) {
        j.kv("depth_reached", u->depth_reached);
        j.key("end_estimate");
        emit_end_estimate(j, u->end_estimate);
        word = &u->word;
    }
    j.kv("word", format_word(word ? *word : MoveWord{}));
    j.kv("depth", static_cast<long>(word ? word->size() : 0));
    j.end_object();
}

struct CommonPoint {
    std::string x, y, z;
    bool exact = false;
    Budget budget;
};

template <class Fn>
int run_guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

std::string sidecar_path(const std::string& out) {
    auto dot = out.rfind('.');
    if (dot == std::string::npos) return out + ".json";
    return out.substr(0, dot) + ".json";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imaginary-character dynamics on the level surfaces of "
                 "-x^2-y^2+z^2+xyz-2"};
    app.require_subcommand(1);
    std::ostringstream unused;

    // ------------------------------------------------------------ classify
    auto* cmd_classify = app.add_subcommand("classify", "classify one character");
    CommonPoint cp;
    int budget_depth = Budget{}.max_depth;
    long budget_walk = Budget{}.geodesic_walk_limit;
    cmd_classify->add_option("--x", cp.x, "x coordinate")->required();
    cmd_classify->add_option("--y", cp.y, "y coordinate")->required();
    cmd_classify->add_option("--z", cp.z, "z coordinate")->required();
    cmd_classify->add_flag("--exact", cp.exact, "exact rational arithmetic");
    cmd_classify->add_option("--budget-depth", budget_depth, "max descent depth");
    cmd_classify->add_option("--budget-walk", budget_walk, "max geodesic walk length");

    // --------------------------------------------------------------- orbit
    auto* cmd_orbit = app.add_subcommand("orbit", "apply a word of generators");
    CommonPoint op;
    std::string word_text;
    cmd_orbit->add_option("--x", op.x)->required();
    cmd_orbit->add_option("--y", op.y)->required();
    cmd_orbit->add_option("--z", op.z)->required();
    cmd_orbit->add_option("--word", word_text, "word over 123abcp")->required();
    cmd_orbit->add_flag("--exact", op.exact);

    // ------------------------------------------------------------ geodesic
    auto* cmd_geo = app.add_subcommand("geodesic",
                                       "traces around the real region (CSV + fit)");
    std::string gx, gy, gz;
    long n_min = -10, n_max = 10;
    cmd_geo->add_option("--x", gx)->required();
    cmd_geo->add_option("--y", gy)->required();
    cmd_geo->add_option("--z", gz)->required();
    cmd_geo->add_option("--n-min", n_min, "first index");
    cmd_geo->add_option("--n-max", n_max, "last index");

    // -------------------------------------------------------------- render
    auto* cmd_render = app.add_subcommand("render", "raster a window to PPM");
    double rk = 8.0;
    std::string rwindow = "-4:4:-4:4", rsheet = "plus", rout = "render.ppm";
    std::string rcoloring = "variant", rcsv;
    int rres = 256, rthreads = 1, rdepth = Budget{}.max_depth;
    cmd_render->add_option("--k", rk, "level value")->required();
    cmd_render->add_option("--sheet", rsheet, "plus|minus");
    cmd_render->add_option("--window", rwindow, "x_min:x_max:y_min:y_max");
    cmd_render->add_option("--res", rres, "pixels per side");
    cmd_render->add_option("--out", rout, "output PPM path");
    cmd_render->add_option("--threads", rthreads, "worker threads");
    cmd_render->add_option("--coloring", rcoloring, "variant|end|depth");
    cmd_render->add_option("--budget-depth", rdepth);
    cmd_render->add_option("--csv", rcsv, "also dump x,y,z,variant,depth rows");

    // -------------------------------------------------------------- measure
    auto* cmd_measure = app.add_subcommand("measure", "area-form quadrature over a window");
    double mk = 8.0;
    std::string mwindow = "-1:1:-1:1", msheet = "plus", mvariant;
    int mres = 256, mthreads = 1, mdepth = Budget{}.max_depth;
    cmd_measure->add_option("--k", mk)->required();
    cmd_measure->add_option("--sheet", msheet);
    cmd_measure->add_option("--window", mwindow);
    cmd_measure->add_option("--res", mres);
    cmd_measure->add_option("--variant", mvariant, "restrict to one classification variant");
    cmd_measure->add_option("--threads", mthreads);
    cmd_measure->add_option("--budget-depth", mdepth);

    // ------------------------------------------------------------- topology
    auto* cmd_topology = app.add_subcommand("topology", "level-set topology facts");
    double tk = 0.0;
    cmd_topology->add_option("--k", tk)->required();

    // ------------------------------------------------------------------ psi
    auto* cmd_psi = app.add_subcommand("psi", "rational parametrization of k = 2");
    double pa = 0.0, pb = 0.0;
    cmd_psi->add_option("--a", pa)->required();
    cmd_psi->add_option("--b", pb)->required();

    // ------------------------------------------------------------------- bq
    auto* cmd_bq = app.add_subcommand("bq", "Bowditch Q-condition check");
    CommonPoint bp;
    std::string bc = "2";
    int bdepth = Budget{}.max_depth;
    long bwalk = Budget{}.geodesic_walk_limit;
    cmd_bq->add_option("--x", bp.x)->required();
    cmd_bq->add_option("--y", bp.y)->required();
    cmd_bq->add_option("--z", bp.z)->required();
    cmd_bq->add_option("--c", bc, "trace bound C >= 2");
    cmd_bq->add_flag("--exact", bp.exact);
    cmd_bq->add_option("--budget-depth", bdepth);
    cmd_bq->add_option("--budget-walk", bwalk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (cmd_classify->parsed()) {
        return run_guarded([&] {
            Budget budget;
            budget.max_depth = budget_depth;
            budget.geodesic_walk_limit = budget_walk;
            JsonWriter j;
            if (cp.exact) {
                ImaginaryCharacter<Rat> c{parse_rat_flag(cp.x, "--x"), parse_rat_flag(cp.y, "--y"),
                                          parse_rat_flag(cp.z, "--z")};
                auto cls = classify(c, budget);
                emit_classification(j, c, cls);
            } else {
                ImaginaryCharacter<double> c{parse_double_flag(cp.x, "--x"),
                                             parse_double_flag(cp.y, "--y"),
                                             parse_double_flag(cp.z, "--z")};
                auto cls = classify(c, budget);
                emit_classification(j, c, cls);
            }
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_orbit->parsed()) {
        return run_guarded([&] {
            MoveWord w;
            try {
                w = parse_word(word_text);
            } catch (const std::invalid_argument& e) {
                throw FlagError(std::string("--word: ") + e.what());
            }
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            j.kv("word", word_text);
            if (op.exact) {
                ImaginaryCharacter<Rat> c{parse_rat_flag(op.x, "--x"), parse_rat_flag(op.y, "--y"),
                                          parse_rat_flag(op.z, "--z")};
                auto r = apply_word(c, w);
                j.key("character");
                emit_character(j, r);
                j.key("kappa");
                emit_scalar(j, kappa(r));
            } else {
                ImaginaryCharacter<double> c{parse_double_flag(op.x, "--x"),
                                             parse_double_flag(op.y, "--y"),
                                             parse_double_flag(op.z, "--z")};
                auto r = apply_word(c, w);
                j.key("character");
                emit_character(j, r);
                j.key("kappa");
                emit_scalar(j, kappa(r));
            }
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_geo->parsed()) {
        return run_guarded([&] {
            ImaginaryCharacter<double> c{parse_double_flag(gx, "--x"), parse_double_flag(gy, "--y"),
                                         parse_double_flag(gz, "--z")};
            if (n_min > n_max) throw FlagError("--n-min/--n-max: empty range");
            auto v = base_vertex(c);
            auto traces = alternating_geodesic(v, 3, n_min, n_max);
            if (c.z * c.z > 4.0) {
                auto fit = fit_alternating_geodesic(c.z, c.x, c.y);
                std::printf("# a=%s b=%s lambda=%s ab=%s\n", fmt_double(fit.a).c_str(),
                            fmt_double(fit.b).c_str(), fmt_double(fit.lambda).c_str(),
                            fmt_double(fit.a * fit.b).c_str());
            } else if (c.z == 2.0 || c.z == -2.0) {
                std::printf("# parabolic z=%s\n", fmt_double(c.z).c_str());
            } else {
                std::printf("# elliptic |z|<2, traces bounded\n");
            }
            std::printf("n,trace\n");
            for (long n = n_min; n <= n_max; ++n)
                std::printf("%ld,%s\n", n,
                            fmt_double(traces[static_cast<std::size_t>(n - n_min)]).c_str());
        });
    }

    if (cmd_render->parsed()) {
        return run_guarded([&] {
            RasterJob job;
            job.k = rk;
            job.sheet = parse_sheet_flag(rsheet);
            job.window = parse_window_flag(rwindow, rres);
            job.budget.max_depth = rdepth;
            if (rcoloring == "variant")
                job.coloring = Coloring::ByVariant;
            else if (rcoloring == "end")
                job.coloring = Coloring::ByEndEstimate;
            else if (rcoloring == "depth")
                job.coloring = Coloring::ByDepth;
            else
                throw FlagError("--coloring: expected variant|end|depth");
            if (rthreads < 1) throw FlagError("--threads: must be >= 1");

            auto out = render_full(job, rthreads);
            {
                std::ofstream f(rout, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open " + rout);
                write_ppm(out.image, f);
            }
            std::array<long, 16> pal_counts{};
            std::array<long, 7> var_counts{};  // 6 variants + void
            for (const auto& p : out.grid) {
                ++pal_counts[static_cast<std::size_t>(p.palette)];
                ++var_counts[static_cast<std::size_t>(p.variant < 0 ? 6 : p.variant)];
            }
            auto emit_stats = [&](JsonWriter& j) {
                j.begin_object();
                for (int v = 0; v < 6; ++v)
                    j.kv(variant_name(static_cast<ClassVariant>(v)), var_counts[v]);
                j.kv("Void", var_counts[6]);
                j.end_object();
            };

            std::string side = sidecar_path(rout);
            {
                JsonWriter j;
                j.begin_object();
                j.kv("schema", "v1");
                j.kv("k", job.k);
                j.kv("sheet", rsheet);
                j.key("window");
                j.begin_object();
                j.kv("x_min", job.window.x_min).kv("x_max", job.window.x_max);
                j.kv("y_min", job.window.y_min).kv("y_max", job.window.y_max);
                j.end_object();
                j.kv("resolution", rres);
                j.key("budget");
                j.begin_object();
                j.kv("max_depth", job.budget.max_depth);
                j.kv("max_abs", job.budget.max_abs);
                j.kv("geodesic_walk_limit", job.budget.geodesic_walk_limit);
                j.end_object();
                j.kv("coloring", rcoloring);
                j.key("palette");
                j.begin_array();
                for (const Rgb& c : palette()) {
                    j.begin_array();
                    j.value(int(c.r));
                    j.value(int(c.g));
                    j.value(int(c.b));
                    j.end_array();
                }
                j.end_array();
                j.key("stats");
                emit_stats(j);
                j.end_object();
                std::ofstream f(side);
                if (!f) throw std::runtime_error("cannot open " + side);
                f << j.str() << "\n";
            }
            if (!rcsv.empty()) {
                std::ofstream f(rcsv);
                if (!f) throw std::runtime_error("cannot open " + rcsv);
                f << "x,y,z,variant,depth\n";
                const Window& w = job.window;
                for (int i = 0; i < w.ny; ++i)
                    for (int jx = 0; jx < w.nx; ++jx) {
                        const auto& p = out.grid[static_cast<std::size_t>(i) * w.nx + jx];
                        double x = w.cell_x(jx), y = w.cell_y(i);
                        auto z = z_sheet(job.k, x, y, job.sheet);
                        f << fmt_double(x) << ',' << fmt_double(y) << ','
                          << (z ? fmt_double(*z) : "nan") << ','
                          << (p.variant < 0 ? "Void"
                                            : variant_name(static_cast<ClassVariant>(p.variant)))
                          << ',' << p.depth << "\n";
                    }
            }
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            j.kv("out", rout);
            j.kv("sidecar", side);
            j.kv("width", out.image.width);
            j.kv("height", out.image.height);
            j.key("stats");
            emit_stats(j);
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_measure->parsed()) {
        return run_guarded([&] {
            Sheet sheet = parse_sheet_flag(msheet);
            Window w = parse_window_flag(mwindow, mres);
            if (mthreads < 1) throw FlagError("--threads: must be >= 1");
            Budget budget;
            budget.max_depth = mdepth;
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            if (mvariant.empty()) {
                auto rep = measure_refined(mk, sheet, w,
                                           [](const ImaginaryCharacter<double>&) { return true; },
                                           mthreads);
                j.kv("value", rep.value);
                j.kv("resolution", mres);
                j.kv("error_estimate", rep.error_estimate);
            } else {
                auto filter = variant_from_name(mvariant);
                if (!filter) throw FlagError("--variant: unknown classification variant name");
                auto rep = measure_region(mk, sheet, w, *filter, budget, mthreads);
                j.kv("variant", mvariant);
                j.kv("value", rep.value);
                j.kv("resolution", mres);
                j.kv("error_estimate", rep.error_estimate);
            }
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_topology->parsed()) {
        return run_guarded([&] {
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            j.kv("k", tk);
            switch (level_topology(tk)) {
                case LevelTopology::TwoSheets: j.kv("topology", "TwoSheets"); break;
                case LevelTopology::ConeSingular: j.kv("topology", "ConeSingular"); break;
                case LevelTopology::Cylinder: j.kv("topology", "Cylinder"); break;
            }
            if (tk >= 2.0) {
                auto [mp, mm] = slopes(tk);
                j.key("slopes");
                j.begin_object();
                j.kv("m_plus", mp);
                j.kv("m_minus", mm);
                j.end_object();
            }
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_psi->parsed()) {
        return run_guarded([&] {
            auto c = psi(pa, pb);
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            j.kv("a", pa);
            j.kv("b", pb);
            j.key("character");
            emit_character(j, c);
            j.kv("kappa", kappa(c));
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    if (cmd_bq->parsed()) {
        return run_guarded([&] {
            Budget budget;
            budget.max_depth = bdepth;
            budget.geodesic_walk_limit = bwalk;
            JsonWriter j;
            j.begin_object();
            j.kv("schema", "v1");
            auto emit_report = [&](auto&& report) {
                j.kv("satisfied", report.satisfied);
                j.kv("omega_size", report.omega_size);
                j.key("witness");
                if (report.witness) {
                    j.begin_object();
                    j.kv("fraction", report.witness->fraction.str());
                    j.kv("parity", report.witness->parity == RegionParity::RealRegion
                                       ? "RealRegion"
                                       : report.witness->parity == RegionParity::ImaginaryRegionX
                                             ? "ImaginaryRegionX"
                                             : "ImaginaryRegionY");
                    j.key("trace");
                    emit_scalar(j, report.witness->trace);
                    j.end_object();
                } else {
                    j.null();
                }
                j.kv("budget_exhausted", report.budget_exhausted);
            };
            if (bp.exact) {
                ImaginaryCharacter<Rat> c{parse_rat_flag(bp.x, "--x"), parse_rat_flag(bp.y, "--y"),
                                          parse_rat_flag(bp.z, "--z")};
                emit_report(bq_check(c, parse_rat_flag(bc, "--c"), budget));
            } else {
                ImaginaryCharacter<double> c{parse_double_flag(bp.x, "--x"),
                                             parse_double_flag(bp.y, "--y"),
                                             parse_double_flag(bp.z, "--z")};
                emit_report(bq_check(c, parse_double_flag(bc, "--c"), budget));
            }
            j.end_object();
            std::cout << j.str() << "\n";
        });
    }

    return 0;
}
