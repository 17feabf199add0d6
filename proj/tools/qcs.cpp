// qcs: corner images, boundary traces, limit shape and grid oracle for the
// straightening of a rectangle of vertical ellipses.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "qcs/limit_solver.hpp"
#include "qcs/mapper.hpp"
#include "qcs/output.hpp"
#include "qcs/parallel.hpp"
#include "qcs/param_solver.hpp"
#include "qcs/pde_oracle.hpp"

using namespace qcs;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "2", "1.5", "1e50", "2.5E+100" -> ln K without forming K.
double parse_log_k(const std::string& text) {
    static const std::regex re(R"(^\s*([0-9]*\.?[0-9]+)(?:[eE]([+-]?[0-9]+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw UsageError("malformed K: '" + text + "'");
    double mant = std::stod(m[1].str());
    long exp10 = m[2].matched ? std::stol(m[2].str()) : 0;
    if (!(mant > 0.0)) throw UsageError("K must be positive");
    double lnK = std::log(mant) + static_cast<double>(exp10) * std::log(10.0);
    if (lnK < 0.0) throw UsageError("K must be at least 1");
    return lnK;
}

/// Options shared by every solver command.
struct Common {
    std::string K;
    std::optional<double> logK;
    double w = 1.0, h = 1.0;
    SolverConfig cfg;
    std::string manifest;

    void attach(CLI::App* app, bool with_solver = true) {
        auto* k = app->add_option("--K", K, "dilatation ratio: decimal or 1eN");
        auto* lk = app->add_option("--logK", logK, "natural log of K");
        k->excludes(lk);
        app->add_option("--w", w, "rectangle half-width")->capture_default_str();
        app->add_option("--h", h, "rectangle half-height")->capture_default_str();
        if (with_solver) {
            app->add_option("--d0", cfg.d0, "Simpson step density")->capture_default_str();
            app->add_option("--r0", cfg.r0, "corner cutoff radius")->capture_default_str();
            app->add_option("--tol", cfg.tol_secant, "secant tolerance")->capture_default_str();
        }
        app->add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    DilatationParams params() const {
        double lnK = 0.0;
        if (logK) {
            if (!(*logK >= 0.0)) throw UsageError("--logK must be >= 0");
            lnK = *logK;
        } else if (!K.empty()) {
            lnK = parse_log_k(K);
        } else {
            throw UsageError("one of --K or --logK is required");
        }
        return {lnK, w, h};
    }

    json to_json() const {
        json j;
        if (logK) j["logK"] = *logK;
        else j["K"] = K;
        j["lnK"] = params().lnK;
        j["w"] = w;
        j["h"] = h;
        j["d0"] = cfg.d0;
        j["r0"] = cfg.r0;
        j["tol"] = cfg.tol_secant;
        return j;
    }
};

using Clock = std::chrono::steady_clock;

std::string cpx_text(cpx z) { return "re=" + fmt15(z.real()) + " im=" + fmt15(z.imag()); }

void write_manifest(RunManifest& m, const std::string& explicit_path, const std::string& out,
                    Clock::time_point start) {
    std::string path = !explicit_path.empty() ? explicit_path : (out.empty() ? "" : out + ".manifest.json");
    if (path.empty()) return;
    m.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    f << m.to_json().dump(2) << '\n';
}

/// Opens `path` for writing, or returns std::cout when empty.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw UsageError("cannot write " + path);
        os = &file;
    }
};

std::vector<cpx> read_points(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    std::vector<cpx> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double re, im;
        if (!(is >> re >> im)) {
            if (pts.empty() && lineno == 1) continue;  // header
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected 're,im'");
        }
        pts.emplace_back(re, im);
    }
    return pts;
}

// ---------------------------------------------------------------------------

int cmd_param(const Common& c, bool as_json) {
    auto start = Clock::now();
    auto p = c.params();
    auto sol = solve_corner(p, c.cfg);
    if (as_json) {
        json j;
        j["parameters"] = c.to_json();
        j["z1"] = {{"re", sol.corners.z1().real()}, {"im", sol.corners.z1().imag()}};
        j["theta1"] = sol.theta1;
        j["residual"] = sol.residual;
        j["iterations"] = sol.iterations;
        j["steps"] = sol.steps;
        j["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "z1 " << cpx_text(sol.corners.z1()) << '\n'
                  << "theta1 " << fmt15(sol.theta1) << '\n'
                  << "steps " << sol.steps << '\n'
                  << "iterations " << sol.iterations << '\n'
                  << "residual " << fmt15(sol.residual) << '\n';
    }
    RunManifest m{"param", c.to_json(), {}, {{"steps", sol.steps}, {"iterations", sol.iterations}}};
    write_manifest(m, c.manifest, "", start);
    return 0;
}

struct TableRow {
    std::string K;
    double d0, r0;
};

std::vector<TableRow> table_rows(const std::string& set) {
    if (set == "table1")
        return {{"2", 0.2, 0.01},    {"10", 0.2, 0.01},     {"100", 0.2, 0.005},
                {"1e4", 0.2, 0.002}, {"1e6", 0.2, 0.001},   {"1e9", 0.2, 5e-4},
                {"1e12", 0.2, 5e-4}, {"1e20", 0.2, 5e-4},   {"1e50", 0.2, 2e-4}};
    if (set == "table2") {
        std::vector<TableRow> rows;
        for (double r0 : {0.1, 1e-3, 1e-12}) rows.push_back({"2", 1.0, r0});
        for (double r0 : {0.5, 0.2, 0.1, 0.01, 1e-4, 1e-8}) rows.push_back({"2", 0.5, r0});
        for (double r0 : {0.5, 0.1, 0.01, 1e-4, 1e-8}) rows.push_back({"2", 0.2, r0});
        for (double r0 : {0.1, 0.01, 1e-4, 1e-8}) rows.push_back({"2", 0.01, r0});
        for (double r0 : {0.1, 0.01, 1e-4, 1e-8}) rows.push_back({"2", 0.001, r0});
        rows.push_back({"2", 1e-5, 1e-8});
        rows.push_back({"2", 0.01, 1e-5});
        return rows;
    }
    if (set == "table3")
        return {{"1e50", 0.2, 2e-4},  {"1e50", 0.2, 1e-8},  {"1e50", 0.2, 1e-12},
                {"1e50", 0.1, 1e-8},  {"1e50", 0.1, 1e-12}, {"1e50", 0.05, 1e-8},
                {"1e50", 0.02, 1e-8}, {"1e50", 0.01, 1e-8}, {"1e50", 1e-4, 1e-12}};
    throw UsageError("unknown table set '" + set + "' (table1, table2, table3)");
}

int cmd_table(const std::string& set, const std::string& out, const std::string& manifest) {
    auto start = Clock::now();
    auto rows = table_rows(set);
    struct Result {
        std::optional<CornerSolution> sol;
        std::string error;
    };
    std::vector<Result> results(rows.size());
    parallel_for(rows.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            SolverConfig cfg;
            cfg.d0 = rows[i].d0;
            cfg.r0 = rows[i].r0;
            try {
                results[i].sol = solve_corner(DilatationParams::square(parse_log_k(rows[i].K)), cfg);
            } catch (const NumericsError& ex) {
                results[i].error = ex.what();
            }
        }
    });

    Sink sink(out);
    std::ostream& os = *sink.os;
    os << "K,re_z1,im_z1,d0,r0,steps\n";
    bool failed = false;
    long long total_steps = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << rows[i].K << ',';
        if (results[i].sol) {
            cpx z = results[i].sol->corners.z1();
            os << fmt15(z.real()) << ',' << fmt15(z.imag());
            total_steps += results[i].sol->steps;
        } else {
            os << "nan,nan";
            failed = true;
            std::cerr << "row " << i << " (K=" << rows[i].K << ", d0=" << rows[i].d0 << ", r0=" << rows[i].r0
                      << "): " << results[i].error << '\n';
        }
        os << ',' << fmt15(rows[i].d0) << ',' << fmt15(rows[i].r0) << ','
           << (results[i].sol ? results[i].sol->steps : 0) << '\n';
    }
    RunManifest m{"table", {{"set", set}}, {}, {{"rows", rows.size()}, {"steps", total_steps}}};
    if (!out.empty()) m.outputs.push_back(out);
    write_manifest(m, manifest, out, start);
    return failed ? kExitSolver : 0;
}

void write_polylines(const std::vector<Polyline>& lines, const std::string& out, const std::string& format) {
    Sink sink(out);
    if (format == "svg") write_polylines_svg(*sink.os, lines);
    else write_polylines_csv(*sink.os, lines);
}

int cmd_boundary(Common c, const std::string& out, const std::string& format) {
    auto start = Clock::now();
    auto p = c.params();
    auto sol = solve_corner(p, c.cfg);
    TraceResult top, right;
    // The two edge traces are independent.
    parallel_for(2, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            (i == 0 ? top : right) = trace_boundary(i == 0 ? Edge::Top : Edge::Right, p, sol.corners, c.cfg);
    });
    std::vector<Polyline> lines;
    for (auto& l : full_boundary(top, right, sol.corners)) lines.push_back(decimate(l));
    write_polylines(lines, out, format);

    BoundingBox bb = bounding_box(lines);
    std::ostream& info = out.empty() ? std::cerr : std::cout;
    info << "z1 " << cpx_text(sol.corners.z1()) << '\n'
         << "bbox re=[" << fmt15(bb.min_re) << ", " << fmt15(bb.max_re) << "] im=[" << fmt15(bb.min_im) << ", "
         << fmt15(bb.max_im) << "]\n"
         << "steps top=" << top.steps << " right=" << right.steps << '\n';

    json params = c.to_json();
    params["eps0"] = c.cfg.eps0;
    params["format"] = format;
    RunManifest m{"boundary", params, {}, {{"top_steps", top.steps}, {"right_steps", right.steps}}};
    if (!out.empty()) m.outputs.push_back(out);
    write_manifest(m, c.manifest, out, start);
    bool ok = top.terminal == TraceTerminal::ReachedAxis && right.terminal == TraceTerminal::ReachedAxis;
    if (!ok) std::cerr << "trace did not reach the symmetry axis\n";
    return ok ? 0 : kExitSolver;
}

int cmd_limit(double w, double h, bool trace, double r0, const std::string& out, const std::string& format,
              const std::string& manifest) {
    auto start = Clock::now();
    auto sol = solve_limit(w, h);
    std::ostream& info = (trace && out.empty()) ? std::cerr : std::cout;
    info << "x_inf " << fmt15(sol.x_inf) << '\n'
         << "sigma " << fmt15(sol.sigma) << '\n'
         << "sigma_x_inf_over_2 " << fmt15(sol.s) << '\n'
         << "pi_sigma_x_inf_over_2 " << fmt15(sol.im_z1_log_K) << '\n'
         << "residual_W " << fmt15(sol.residual_W) << '\n'
         << "residual_H " << fmt15(sol.residual_H) << '\n';
    RunManifest m{"limit", {{"w", w}, {"h", h}, {"trace", trace}, {"r0", r0}, {"format", format}}, {}, {}};
    if (trace) {
        auto curves = trace_limit_shape(sol, 1e-4, r0);
        std::vector<Polyline> lines;
        long long steps = 0;
        for (auto& t : curves) {
            lines.push_back(decimate(t.points));
            steps += t.steps;
        }
        write_polylines(lines, out, format);
        m.counters["steps"] = steps;
        if (!out.empty()) m.outputs.push_back(out);
    }
    write_manifest(m, manifest, out, start);
    return 0;
}

int cmd_pde(const Common& c, const std::string& support_name, std::optional<double> a, int n,
            std::optional<int> levels, double extent, long long sweeps, bool standard_corners, bool no_align,
            const std::string& out) {
    auto start = Clock::now();
    Support support;
    if (support_name == "rect") support = Support::Rect;
    else if (support_name == "disk") support = Support::Disk;
    else throw UsageError("--support must be rect or disk");
    if (support == Support::Disk && !a) throw UsageError("disk support needs --a");

    int lv = 0;
    if (levels) {
        lv = *levels;
    } else {
        int m = (n - 1) / 16;
        while ((1 << lv) < m) ++lv;
        if (n < 17 || (n - 1) % 16 != 0 || (1 << lv) != m) throw UsageError("--n must be 16 * 2^k + 1");
        ++lv;
    }
    DilatationParams p{0.0, c.w, c.h};
    if (support == Support::Rect) p = c.params();
    GridOptions opts;
    opts.extent = extent;
    opts.a = a;
    opts.align_support = !no_align;
    opts.cell_average_corners = !standard_corners;
    auto res = multigrid_solve(p, support, lv, sweeps, std::nullopt, opts);

    std::ostream& info = out.empty() ? std::cerr : std::cout;
    if (!out.empty()) {
        Sink sink(out);
        write_grid_csv(*sink.os, res.field);
    }
    info << "n " << res.field.n << '\n'
         << "extent " << fmt15(res.field.extent) << '\n'
         << "sweeps " << res.sweeps << '\n'
         << "residual " << fmt15(res.residual) << '\n'
         << "converged " << (res.converged ? "true" : "false") << '\n';
    if (support == Support::Rect) {
        info << "corner_image " << cpx_text(corner_image_estimate(res.field, p)) << '\n';
    } else {
        auto ax = disk_semi_axes(res.field);
        info << "semi_major " << fmt15(ax.major) << "\nsemi_minor " << fmt15(ax.minor) << '\n';
    }

    json params = support == Support::Rect ? c.to_json() : json{{"a", *a}};
    params["support"] = support_name;
    params["n"] = res.field.n;
    params["levels"] = lv;
    params["extent"] = extent;
    params["sweeps_per_level"] = sweeps;
    params["standard_corners"] = standard_corners;
    params["align_support"] = !no_align;
    RunManifest m{"pde", params, {}, {{"sweeps", res.sweeps}}};
    if (!out.empty()) m.outputs.push_back(out);
    write_manifest(m, c.manifest, out, start);
    if (!res.converged) std::cerr << "warning: sweep budget exhausted before the tolerance was met\n";
    return 0;
}

int cmd_map(bool inverse, const Common& c, const std::string& points_path, const std::string& out) {
    auto start = Clock::now();
    auto p = c.params();
    auto pts = read_points(points_path);
    auto sol = solve_corner(p, c.cfg);
    std::vector<cpx> img(pts.size());
    std::vector<std::string> err(pts.size());
    parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            try {
                if (inverse) {
                    img[i] = inverse_map(pts[i], p, sol.corners, c.cfg);
                } else {
                    bool inside = std::abs(pts[i].real()) < p.half_width && std::abs(pts[i].imag()) < p.half_height;
                    img[i] = forward_map(pts[i], inside ? Chart::Inside : Chart::Outside, p, sol.corners, c.cfg);
                }
            } catch (const NumericsError& ex) {
                err[i] = ex.what();
                img[i] = cpx(NAN, NAN);
            }
        }
    });
    Sink sink(out);
    *sink.os << "re,im,out_re,out_im\n";
    bool failed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        *sink.os << fmt15(pts[i].real()) << ',' << fmt15(pts[i].imag()) << ',' << fmt15(img[i].real()) << ','
                 << fmt15(img[i].imag()) << '\n';
        if (!err[i].empty()) {
            failed = true;
            std::cerr << "point " << i << ": " << err[i] << '\n';
        }
    }
    RunManifest m{inverse ? "invert" : "forward", c.to_json(), {}, {{"points", pts.size()}}};
    m.parameters["points"] = points_path;
    if (!out.empty()) m.outputs.push_back(out);
    write_manifest(m, c.manifest, out, start);
    return failed ? kExitSolver : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Straightening of a rectangle of vertical ellipses: corner images, traces, limit shape"};
    app.set_help_flag("--help", "print help");  // -h is taken by the half-height
    app.require_subcommand(1);

    Common param_c;
    bool as_json = false;
    auto* param = app.add_subcommand("param", "solve for the corner image z1");
    param_c.attach(param);
    param->add_flag("--json", as_json, "print JSON");

    std::string set, table_out, table_manifest;
    auto* table = app.add_subcommand("table", "replay a parameter grid as CSV");
    table->add_option("--set", set, "table1, table2 or table3")->required();
    table->add_option("--out", table_out, "CSV path (default stdout)");
    table->add_option("--manifest", table_manifest, "manifest path");

    Common bnd_c;
    std::string bnd_out, bnd_format = "csv";
    auto* boundary = app.add_subcommand("boundary", "trace the image of the rectangle boundary");
    bnd_c.attach(boundary);
    boundary->add_option("--eps0", bnd_c.cfg.eps0, "trace step")->capture_default_str();
    boundary->add_option("--out", bnd_out, "output path (default stdout)");
    boundary->add_option("--format", bnd_format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));

    double lw = 1.0, lh = 1.0, lr0 = 1e-3;
    bool ltrace = false;
    std::string lim_out, lim_format = "csv", lim_manifest;
    auto* limit = app.add_subcommand("limit", "solve the K -> infinity limit system");
    limit->add_option("--w", lw, "rectangle half-width")->capture_default_str();
    limit->add_option("--h", lh, "rectangle half-height")->capture_default_str();
    limit->add_flag("--trace", ltrace, "also trace the limit shape");
    limit->add_option("--r0", lr0, "truncation radius at x_inf")->capture_default_str();
    limit->add_option("--out", lim_out, "polyline output path (default stdout)");
    limit->add_option("--format", lim_format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
    limit->add_option("--manifest", lim_manifest, "manifest path");

    Common pde_c;
    std::string support = "rect", pde_out;
    std::optional<double> pde_a;
    std::optional<int> pde_levels;
    int pde_n = 129;
    double pde_extent = 10.0;
    long long pde_sweeps = 2'000'000;
    bool std_corners = false, no_align = false;
    auto* pde = app.add_subcommand("pde", "grid relaxation oracle");
    pde_c.attach(pde, false);
    pde->add_option("--support", support, "rect or disk")->capture_default_str();
    pde->add_option("--a", pde_a, "disk Beltrami coefficient in (0, 1)");
    pde->add_option("--n", pde_n, "finest grid size, 16 * 2^k + 1")->capture_default_str();
    pde->add_option("--levels", pde_levels, "refinement levels (overrides --n)");
    pde->add_option("--extent", pde_extent, "half-size of the outer square")->capture_default_str();
    pde->add_option("--sweeps", pde_sweeps, "sweep budget per level")->capture_default_str();
    pde->add_flag("--standard-corners", std_corners, "plain 5-point stencil at support corners");
    pde->add_flag("--no-align", no_align, "keep the extent even if the support misses grid lines");
    pde->add_option("--out", pde_out, "grid CSV path");

    Common inv_c, fwd_c;
    std::string inv_pts, inv_out, fwd_pts, fwd_out;
    auto* invert = app.add_subcommand("invert", "batch phi^{-1} along radial rays from infinity");
    inv_c.attach(invert);
    invert->add_option("--points", inv_pts, "CSV 're,im' per line")->required();
    invert->add_option("--out", inv_out, "CSV path (default stdout)");
    auto* forward = app.add_subcommand("forward", "batch phi from the chart anchors");
    fwd_c.attach(forward);
    forward->add_option("--points", fwd_pts, "CSV 're,im' per line")->required();
    forward->add_option("--out", fwd_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*param) return cmd_param(param_c, as_json);
        if (*table) return cmd_table(set, table_out, table_manifest);
        if (*boundary) return cmd_boundary(bnd_c, bnd_out, bnd_format);
        if (*limit) return cmd_limit(lw, lh, ltrace, lr0, lim_out, lim_format, lim_manifest);
        if (*pde)
            return cmd_pde(pde_c, support, pde_a, pde_n, pde_levels, pde_extent, pde_sweeps, std_corners, no_align,
                           pde_out);
        if (*invert) return cmd_map(true, inv_c, inv_pts, inv_out);
        if (*forward) return cmd_map(false, fwd_c, fwd_pts, fwd_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}
