#include "ricker/scan.hpp"

#include <cmath>
#include <stdexcept>

#include "ricker/parallel.hpp"

namespace ricker {

const char* to_string(CellVerdict v) {
    switch (v) {
        case CellVerdict::FeasibleUnique: return "FeasibleUnique";
        case CellVerdict::InfeasibleRoot: return "InfeasibleRoot";
        case CellVerdict::NoRootFound: return "NoRootFound";
        case CellVerdict::StableFeasible: return "StableFeasible";
        case CellVerdict::UnstableFeasible: return "UnstableFeasible";
        case CellVerdict::StabilityUndefined: return "StabilityUndefined";
    }
    return "?";
}

bool is_feasible_verdict(CellVerdict v) {
    return v == CellVerdict::FeasibleUnique || v == CellVerdict::StableFeasible ||
           v == CellVerdict::UnstableFeasible;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(n - 1);
    return out;
}

void check_axes(double r_min, double r_max, double v_min, double v_max,
                std::size_t nr, std::size_t nv) {
    if (nr < 1 || nv < 1)
        throw std::domain_error("scan: nr and nv must be >= 1");
    if (!(r_min > 0))
        throw std::domain_error("scan: r_min must be positive");
    if (!(v_min > 1))
        throw std::domain_error("scan: v_min must exceed 1");
    if (nr > 1 && !(r_max > r_min))
        throw std::domain_error("scan: r_max must exceed r_min");
    if (nv > 1 && !(v_max > v_min))
        throw std::domain_error("scan: v_max must exceed v_min");
}

CellVerdict from_equilibrium(EquilibriumVerdict v) {
    switch (v) {
        case EquilibriumVerdict::FeasibleUnique: return CellVerdict::FeasibleUnique;
        case EquilibriumVerdict::InfeasibleRoot: return CellVerdict::InfeasibleRoot;
        case EquilibriumVerdict::NoRootFound: return CellVerdict::NoRootFound;
    }
    return CellVerdict::NoRootFound;
}

CellVerdict from_class(CellClass c) {
    switch (c) {
        case CellClass::StableFeasible: return CellVerdict::StableFeasible;
        case CellClass::UnstableFeasible: return CellVerdict::UnstableFeasible;
        case CellClass::InfeasibleRoot: return CellVerdict::InfeasibleRoot;
        case CellClass::NoRootFound: return CellVerdict::NoRootFound;
        case CellClass::StabilityUndefined: return CellVerdict::StabilityUndefined;
    }
    return CellVerdict::StabilityUndefined;
}

ScanGrid run_scan(ScanGrid::Kind kind, double r_min, double r_max, double v_min,
                  double v_max, std::size_t nr, std::size_t nv, double z_max) {
    check_axes(r_min, r_max, v_min, v_max, nr, nv);

    ScanGrid grid;
    grid.kind = kind;
    grid.r_axis = linspace(r_min, r_max, nr);
    grid.v_axis = linspace(v_min, v_max, nv);
    grid.z_max = z_max;
    grid.cells.resize(nr * nv);

    parallel_for(nr * nv, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t ir = i % nr;
            const std::size_t iv = i / nr;
            const Params p{grid.r_axis[ir], grid.v_axis[iv]};
            const EquilibriumResult eq = solve_equilibrium(p, z_max);
            ScanCell cell;
            cell.z_star = eq.z_star;
            cell.boundary = eq.boundary;
            if (kind == ScanGrid::Kind::Existence) {
                cell.verdict = from_equilibrium(eq.verdict);
                cell.mu_star = eq.mu_star;
                cell.s_star = eq.s_star;
                cell.n_roots = count_roots(p, z_max);
            } else {
                const CellClass cls = classify_at(eq, p);
                cell.verdict = from_class(cls);
                if (eq.feasible) {
                    cell.mu_star = eq.mu_star;
                    cell.s_star = eq.s_star;
                    if (cls == CellClass::StableFeasible ||
                        cls == CellClass::UnstableFeasible)
                        cell.stable = (cls == CellClass::StableFeasible);
                }
            }
            grid.cells[i] = cell;
        }
    });
    return grid;
}

}  // namespace

ScanGrid existence_scan(double r_min, double r_max, double v_min, double v_max,
                        std::size_t nr, std::size_t nv, double z_max) {
    return run_scan(ScanGrid::Kind::Existence, r_min, r_max, v_min, v_max, nr,
                    nv, z_max);
}

ScanGrid stability_scan(double r_min, double r_max, double v_min, double v_max,
                        std::size_t nr, std::size_t nv, double z_max) {
    return run_scan(ScanGrid::Kind::Stability, r_min, r_max, v_min, v_max, nr,
                    nv, z_max);
}

BoundaryError boundary_error(const ScanGrid& grid) {
    BoundaryError err;
    const std::size_t nr = grid.nr();
    const std::size_t nv = grid.nv();
    for (std::size_t ir = 0; ir < nr; ++ir) {
        bool found = false;
        for (std::size_t iv = 0; iv + 1 < nv; ++iv) {
            if (is_feasible_verdict(grid.at(ir, iv).verdict) &&
                grid.at(ir, iv + 1).verdict == CellVerdict::InfeasibleRoot) {
                const double v_mid = 0.5 * (grid.v_axis[iv] + grid.v_axis[iv + 1]);
                const double dev =
                    std::fabs(v_mid - feasibility_threshold(grid.r_axis[ir]));
                err.max_abs_dev = std::max(err.max_abs_dev, dev);
                ++err.columns_with_flip;
                found = true;
                break;
            }
        }
        if (!found) ++err.columns_skipped;
    }
    return err;
}

}  // namespace ricker
