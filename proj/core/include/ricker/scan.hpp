#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ricker/equilibrium.hpp"
#include "ricker/stability.hpp"

namespace ricker {

// Union of the existence verdicts and the stability classes, so one cell
// type serves both scan kinds. An existence scan only produces the first
// three labels.
enum class CellVerdict {
    FeasibleUnique,
    InfeasibleRoot,
    NoRootFound,
    StableFeasible,
    UnstableFeasible,
    StabilityUndefined,
};

const char* to_string(CellVerdict v);

// True for the labels on the feasible side of the threshold curve.
bool is_feasible_verdict(CellVerdict v);

struct ScanCell {
    CellVerdict verdict = CellVerdict::NoRootFound;
    std::optional<double> z_star;
    std::optional<double> mu_star;
    std::optional<double> s_star;
    std::optional<bool> stable;   // stability scans only, feasible cells only
    std::size_t n_roots = 0;      // existence scans record the multiplicity
    bool boundary = false;        // root within slack of r = ln(1+z*)
};

struct ScanGrid {
    enum class Kind { Existence, Stability };
    Kind kind = Kind::Existence;
    std::vector<double> r_axis;  // strictly increasing
    std::vector<double> v_axis;  // strictly increasing
    // Row-major with v as the outer index: cells[iv * nr + ir].
    std::vector<ScanCell> cells;
    double z_max = kDefaultZMax;

    std::size_t nr() const { return r_axis.size(); }
    std::size_t nv() const { return v_axis.size(); }
    const ScanCell& at(std::size_t ir, std::size_t iv) const {
        return cells[iv * r_axis.size() + ir];
    }
};

// Per cell: solve_equilibrium + count_roots. Cells run concurrently; assembly
// is by index, so the grid is identical for any thread count. nr = nv = 1
// degenerates to a single cell at (r_min, v_min).
ScanGrid existence_scan(double r_min, double r_max, double v_min, double v_max,
                        std::size_t nr, std::size_t nv,
                        double z_max = kDefaultZMax);

// Per cell: stability classification at the solved equilibrium.
ScanGrid stability_scan(double r_min, double r_max, double v_min, double v_max,
                        std::size_t nr, std::size_t nv,
                        double z_max = kDefaultZMax);

struct BoundaryError {
    double max_abs_dev = 0;           // max |v_flip_mid - R(r)| over columns
    std::size_t columns_with_flip = 0;
    std::size_t columns_skipped = 0;  // no feasible->infeasible flip found
    bool empty() const { return columns_with_flip == 0; }
};

// For each r column, finds the flip from a feasible verdict to InfeasibleRoot
// along increasing v and measures the midpoint's deviation from the analytic
// threshold curve. Columns without such a flip are skipped and counted; a
// grid with no flips anywhere returns an empty result, not an error.
BoundaryError boundary_error(const ScanGrid& grid);

}  // namespace ricker
