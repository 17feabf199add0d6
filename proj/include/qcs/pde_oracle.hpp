#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

enum class Support { Rect, Disk };

enum class NodeClass : std::uint8_t { Outside, Inside, SideL, SideR, SideU, SideD, Corner, Dirichlet };

/// Uniform (n x n) grid on [-extent, extent]^2 carrying the unknown phi and
/// the modified-Laplacian stencil. Node (i, j) sits at ((i - c) s, (j - c) s), c = (n - 1) / 2.
struct GridField {
    int n = 0;
    double spacing = 0.0;
    double extent = 0.0;
    std::vector<cpx> values;
    std::vector<NodeClass> cls;
    /// Local edge lengths (l, r, u, d) in the node's own chart.
    std::vector<std::array<double, 4>> lengths;
    /// Barycentric weights of the (left, right, up, down) neighbours, summing to 1.
    std::vector<std::array<double, 4>> bary;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
    cpx node(int i, int j) const {
        double c = 0.5 * (n - 1);
        return {(i - c) * spacing, (j - c) * spacing};
    }
    cpx& at(int i, int j) { return values[index(i, j)]; }
    cpx at(int i, int j) const { return values[index(i, j)]; }
    /// Indices of the node closest to p.
    std::pair<int, int> nearest(cpx p) const;
};

struct GridOptions {
    double extent = 10.0;
    /// Disk variant: Beltrami coefficient a in (0, 1), K = (1 + a) / (1 - a).
    std::optional<double> a;
    /// Move the extent to the nearest value that puts the rectangle sides on grid lines.
    bool align_support = true;
    /// Mixed nodes that are not on a straight side: standard 5-point stencil
    /// (false) or conductances averaged over the four surrounding cells (true).
    bool cell_average_corners = true;
};

/// Extent closest to `extent` for which the half-width is a whole number of spacings.
double aligned_extent(double extent, int n, double half_width);

/// Stencil setup. Cells are classified by their centres; a node's class
/// follows from its four surrounding cells.
GridField assemble(const DilatationParams& params, int n, Support support,
                   const GridOptions& opts = {});

/// Barycentric weights from local lengths: (u+d)/2l, (u+d)/2r, (l+r)/2u, (l+r)/2d, normalized.
std::array<double, 4> barycentric_weights(const std::array<double, 4>& lengths);

struct SweepResult {
    GridField field;
    double residual;  // max |new - old|
};

/// One Jacobi sweep into a fresh field.
SweepResult jacobi_sweep(const GridField& field);

/// In-place Jacobi iterations (double-buffered, threaded) until the sweep
/// change drops below tol or max_sweeps is reached. Returns the last residual
/// and the sweep count.
std::pair<double, long long> relax(GridField& field, long long max_sweeps, double tol);

/// Refine (n -> 2n - 1): new nodes average their old neighbours. The stencil
/// of `fine` is kept; only values are filled.
void prolongate(const GridField& coarse, GridField& fine);

struct MultigridResult {
    GridField field;
    double residual;
    long long sweeps;
    bool converged;
};

/// Nested iteration from n = 17 up to n = 16 * 2^(levels-1) + 1.
MultigridResult multigrid_solve(const DilatationParams& params, Support support, int levels,
                                long long sweeps_per_level, std::optional<double> tol = std::nullopt,
                                const GridOptions& opts = {});

/// Value at the grid node nearest w + ih, the image of the rectangle corner.
cpx corner_image_estimate(const GridField& field, const DilatationParams& params);

struct DiskAxes {
    double major;  // max |phi(z)| / |z|
    double minor;  // min |phi(z)| / |z|
};

/// Ratios |phi(z)| / |z| over the inside nodes next to the disk boundary.
DiskAxes disk_semi_axes(const GridField& field);

/// Rows "i,j,re,im".
void write_grid_csv(std::ostream& os, const GridField& field);

}  // namespace qcs
