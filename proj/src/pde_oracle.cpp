#include "qcs/pde_oracle.hpp"

#include <algorithm>
#include <limits>
#include <atomic>
#include <barrier>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include "qcs/parallel.hpp"

namespace qcs {

std::pair<int, int> GridField::nearest(cpx p) const {
    double c = 0.5 * (n - 1);
    auto clampi = [&](double v) { return std::clamp(static_cast<int>(std::lround(v / spacing + c)), 0, n - 1); };
    return {clampi(p.real()), clampi(p.imag())};
}

double aligned_extent(double extent, int n, double half_width) {
    double cells = std::max(1.0, std::round(half_width * (n - 1) / (2.0 * extent)));
    return half_width * (n - 1) / (2.0 * cells);
}

std::array<double, 4> barycentric_weights(const std::array<double, 4>& len) {
    auto [l, r, u, d] = len;
    std::array<double, 4> w{(u + d) / (2 * l), (u + d) / (2 * r), (l + r) / (2 * u), (l + r) / (2 * d)};
    double sum = w[0] + w[1] + w[2] + w[3];
    for (double& x : w) x /= sum;
    return w;
}

GridField assemble(const DilatationParams& params, int n, Support support, const GridOptions& opts) {
    params.validate();
    if (n < 17) throw ConfigError("grid needs n >= 17");
    double K;
    if (support == Support::Disk) {
        if (!opts.a || !(*opts.a > 0.0 && *opts.a < 1.0)) throw ConfigError("disk support needs a in (0, 1)");
        K = (1.0 + *opts.a) / (1.0 - *opts.a);
    } else {
        K = std::exp(params.lnK);
    }
    const double w = params.half_width, h = params.half_height;
    double extent = opts.extent;
    if (support == Support::Rect && opts.align_support) extent = aligned_extent(extent, n, w);
    if (!(std::max(w, h) < extent)) throw ConfigError("support does not fit inside the grid");

    GridField f;
    f.n = n;
    f.extent = extent;
    f.spacing = 2.0 * extent / (n - 1);
    const double s = f.spacing;
    const std::size_t N = static_cast<std::size_t>(n) * n;
    f.values.resize(N);
    f.cls.resize(N);
    f.lengths.resize(N);
    f.bary.resize(N);

    // Cell (i, j) spans nodes i..i+1, j..j+1.
    auto cell_inside = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= n - 1 || j >= n - 1) return false;
        cpx c = f.node(i, j) + cpx(0.5 * s, 0.5 * s);
        if (support == Support::Disk) return std::norm(c) < w * w;
        return std::abs(c.real()) < w && std::abs(c.imag()) < h;
    };

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::size_t k = f.index(i, j);
            f.values[k] = f.node(i, j);
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                f.cls[k] = NodeClass::Dirichlet;
                continue;
            }
            bool ne = cell_inside(i, j), nw = cell_inside(i - 1, j);
            bool sw = cell_inside(i - 1, j - 1), se = cell_inside(i, j - 1);
            int count = ne + nw + sw + se;
            NodeClass c = NodeClass::Corner;
            if (count == 4) c = NodeClass::Inside;
            else if (count == 0) c = NodeClass::Outside;
            else if (count == 2 && ne && se) c = NodeClass::SideL;
            else if (count == 2 && nw && sw) c = NodeClass::SideR;
            else if (count == 2 && sw && se) c = NodeClass::SideU;
            else if (count == 2 && ne && nw) c = NodeClass::SideD;
            f.cls[k] = c;

            // Inside chart (x, y) -> (Kx, y); on a horizontal side the
            // equivalent chart (x, y/K) keeps the lengths along the side.
            std::array<double, 4> len{s, s, s, s};
            switch (c) {
                case NodeClass::Inside: len = {K * s, K * s, s, s}; break;
                case NodeClass::SideL: len = {s, K * s, s, s}; break;
                case NodeClass::SideR: len = {K * s, s, s, s}; break;
                case NodeClass::SideU: len = {s, s, s, s / K}; break;
                case NodeClass::SideD: len = {s, s, s / K, s}; break;
                default: break;
            }
            f.lengths[k] = len;
            f.bary[k] = barycentric_weights(len);
            if (c == NodeClass::Corner && opts.cell_average_corners) {
                // Dual-cell faces split between the two cells they cross:
                // sigma_x = 1/K, sigma_y = K inside, 1 outside.
                auto sx = [&](bool in) { return in ? 1.0 / K : 1.0; };
                auto sy = [&](bool in) { return in ? K : 1.0; };
                std::array<double, 4> g{sx(nw) + sx(sw), sx(ne) + sx(se), sy(ne) + sy(nw), sy(se) + sy(sw)};
                double sum = g[0] + g[1] + g[2] + g[3];
                for (double& x : g) x /= sum;
                f.bary[k] = g;
            }
        }
    }
    return f;
}

namespace {

double sweep_rows(const GridField& f, const std::vector<cpx>& src, std::vector<cpx>& dst, int j0, int j1) {
    double res = 0.0;
    const int n = f.n;
    for (int j = std::max(j0, 1); j < std::min(j1, n - 1); ++j) {
        for (int i = 1; i < n - 1; ++i) {
            std::size_t k = f.index(i, j);
            const auto& b = f.bary[k];
            cpx v = b[0] * src[k - 1] + b[1] * src[k + 1] + b[2] * src[k + n] + b[3] * src[k - n];
            res = std::max(res, std::abs(v - src[k]));
            dst[k] = v;
        }
    }
    return res;
}

}  // namespace

std::pair<double, long long> relax(GridField& field, long long max_sweeps, double tol) {
    if (max_sweeps <= 0) return {std::numeric_limits<double>::infinity(), 0};
    std::vector<cpx> other = field.values;
    std::vector<cpx>* src = &field.values;
    std::vector<cpx>* dst = &other;

    const unsigned T = std::max(1u, std::min<unsigned>(thread_count(), field.n / 8 + 1));
    std::vector<double> partial(T, 0.0);
    long long sweeps = 0;
    double residual = 0.0;
    bool stop = false;
    auto on_sweep = [&]() noexcept {
        residual = *std::max_element(partial.begin(), partial.end());
        std::swap(src, dst);
        ++sweeps;
        stop = residual < tol || sweeps >= max_sweeps;
    };
    std::barrier sync(static_cast<std::ptrdiff_t>(T), on_sweep);
    auto worker = [&](unsigned t) {
        int rows = field.n;
        int j0 = static_cast<int>(static_cast<long long>(rows) * t / T);
        int j1 = static_cast<int>(static_cast<long long>(rows) * (t + 1) / T);
        do {
            partial[t] = sweep_rows(field, *src, *dst, j0, j1);
            sync.arrive_and_wait();
        } while (!stop);
    };
    if (T == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < T; ++t) pool.emplace_back(worker, t);
    }
    if (src != &field.values) field.values = *src;
    return {residual, sweeps};
}

SweepResult jacobi_sweep(const GridField& field) {
    SweepResult out{field, 0.0};
    out.residual = relax(out.field, 1, 0.0).first;
    return out;
}

void prolongate(const GridField& coarse, GridField& fine) {
    if (fine.n != 2 * coarse.n - 1) throw ConfigError("prolongation needs n_fine = 2 n_coarse - 1");
    auto c = [&](int i, int j) { return coarse.at(i, j); };
    for (int j = 0; j < fine.n; ++j) {
        for (int i = 0; i < fine.n; ++i) {
            if (fine.cls[fine.index(i, j)] == NodeClass::Dirichlet) continue;
            int ci = i / 2, cj = j / 2;
            cpx v;
            if (i % 2 == 0 && j % 2 == 0) v = c(ci, cj);
            else if (j % 2 == 0) v = 0.5 * (c(ci, cj) + c(ci + 1, cj));
            else if (i % 2 == 0) v = 0.5 * (c(ci, cj) + c(ci, cj + 1));
            else v = 0.25 * (c(ci, cj) + c(ci + 1, cj) + c(ci, cj + 1) + c(ci + 1, cj + 1));
            fine.at(i, j) = v;
        }
    }
}

MultigridResult multigrid_solve(const DilatationParams& params, Support support, int levels,
                                long long sweeps_per_level, std::optional<double> tol,
                                const GridOptions& opts) {
    if (levels < 1) throw ConfigError("multigrid needs at least one level");
    const int finest = 16 * (1 << (levels - 1)) + 1;
    GridOptions o = opts;
    if (support == Support::Rect && o.align_support) o.extent = aligned_extent(o.extent, finest, params.half_width);
    o.align_support = false;
    const double t = tol.value_or(1e-10 * o.extent);

    MultigridResult out{{}, 0.0, 0, false};
    for (int level = 0; level < levels; ++level) {
        int n = 16 * (1 << level) + 1;
        GridField f = assemble(params, n, support, o);
        if (level > 0) prolongate(out.field, f);
        auto [res, sw] = relax(f, sweeps_per_level, t);
        out.field = std::move(f);
        out.residual = res;
        out.sweeps += sw;
    }
    out.converged = out.residual < t;
    return out;
}

cpx corner_image_estimate(const GridField& field, const DilatationParams& params) {
    auto [i, j] = field.nearest(params.target());
    return field.at(i, j);
}

DiskAxes disk_semi_axes(const GridField& field) {
    DiskAxes ax{0.0, std::numeric_limits<double>::infinity()};
    const int n = field.n;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            std::size_t k = field.index(i, j);
            if (field.cls[k] != NodeClass::Inside) continue;
            bool edge = false;
            for (std::size_t kk : {k - 1, k + 1, k - n, k + n}) edge |= field.cls[kk] != NodeClass::Inside;
            if (!edge) continue;
            double q = std::abs(field.values[k]) / std::abs(field.node(i, j));
            ax.major = std::max(ax.major, q);
            ax.minor = std::min(ax.minor, q);
        }
    if (ax.major == 0.0) throw InsufficientDataError("no inside nodes on the disk boundary");
    return ax;
}

void write_grid_csv(std::ostream& os, const GridField& field) {
    os << "i,j,re,im\n" << std::setprecision(15);
    for (int j = 0; j < field.n; ++j)
        for (int i = 0; i < field.n; ++i) {
            cpx v = field.at(i, j);
            os << i << ',' << j << ',' << v.real() << ',' << v.imag() << '\n';
        }
}

}  // namespace qcs
