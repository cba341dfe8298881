#pragma once

#include <array>
#include <functional>
#include <optional>

#include "ricker/equilibrium.hpp"
#include "ricker/moment_map.hpp"

namespace ricker {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class JacobianStatus {
    Ok,
    StencilBreakdown,  // the map broke down at a stencil point
    NotConverged,      // halving the step still moved entries > 1e-5 relative
};

struct JacobianResult {
    JacobianStatus status = JacobianStatus::StencilBreakdown;
    Mat2 jacobian{};      // accepted matrix (finest level, or extrapolated)
    Mat2 coarse{};        // matrix at the coarser step, for flip detection
    Vec2 fd_step{};       // base central-difference steps (mu, s)
    bool used_richardson = false;
};

// Generic 2-D central-difference Jacobian with step-halving acceptance:
// h_j = max(|x_j|, 1) * eps^(1/3), entries accepted when halving changes
// every one of them by < 1e-5 relative (floor 1 on the denominator), with a
// single Richardson-extrapolated retry before giving up. f returns nullopt
// where it is undefined; that maps to StencilBreakdown.
JacobianResult fd_jacobian(const std::function<std::optional<Vec2>(Vec2)>& f,
                           Vec2 point);

// Jacobian of the closed moment map at `point`.
JacobianResult numerical_jacobian(MomentState point, Params p);

struct StabilityReport {
    Mat2 jacobian{};
    double trace = 0;
    double det = 0;
    // 1 - tr + det > 0,  1 + tr + det > 0,  1 - det > 0 (strict)
    std::array<bool, 3> schur{};
    bool stable = false;  // conjunction of the three
    Vec2 fd_step{};       // zero unless filled by the caller
};

// Evaluates the three Schur inequalities on a given matrix. Both eigenvalues
// lie strictly inside the unit circle iff all three hold.
StabilityReport schur_test(const Mat2& j);

enum class CellClass {
    StableFeasible,
    UnstableFeasible,
    InfeasibleRoot,
    NoRootFound,
    StabilityUndefined,
};

const char* to_string(CellClass c);

// solve_equilibrium, then Jacobian + Schur at the fixed point. Total on valid
// Params: every numeric anomaly (stencil breakdown, non-convergent
// differences, a Schur verdict that flips between difference levels) lands in
// StabilityUndefined rather than an exception.
CellClass classify(Params p, double z_max = kDefaultZMax);

// Same, reusing an already-computed equilibrium result.
CellClass classify_at(const EquilibriumResult& eq, Params p);

}  // namespace ricker
