#pragma once

#include <cstddef>
#include <optional>

#include "ricker/moment_map.hpp"

namespace ricker {

inline constexpr double kDefaultZMax = 30000.0;
inline constexpr std::size_t kDefaultBracketNodes = 2048;

enum class EquilibriumVerdict { FeasibleUnique, InfeasibleRoot, NoRootFound };

const char* to_string(EquilibriumVerdict v);

// Outcome of the scalar root solve. z_star parametrizes the fixed point via
// mu* = z*(r - ln(1+z*)) / (r ln(1+z*)), s* = mu* z* / r; the fixed point is
// biologically meaningful only when r > ln(1+z*), equivalently z* < e^r - 1.
struct EquilibriumResult {
    EquilibriumVerdict verdict = EquilibriumVerdict::NoRootFound;
    std::optional<double> z_star;
    std::optional<double> mu_star;  // engaged only for FeasibleUnique
    std::optional<double> s_star;   // engaged only for FeasibleUnique
    bool feasible = false;          // == (verdict == FeasibleUnique)
    // Root within relative slack 1e-9 of the feasibility boundary
    // r = ln(1+z*). The verdict is still decided by the sign, but flagged so
    // callers can treat the cell as unresolved at this resolution.
    bool boundary = false;
    double z_min = 0;        // e^r - 1
    double f_residual = 0;   // |F(z*)|, NaN when no root was found
};

// F(z; r, v) = (r/ln(1+z) + 1) ln(1+2z) - 2r - ln v.
// Below z = 1e-8 the direct form loses to 0/0 amplification and a series
// anchored at F(0+) = -ln v is used instead. Throws std::domain_error for
// z <= 0, r <= 0 or v <= 1.
double aux_f(double z, double r, double v);

// F'(z) = r Phi'(z) + 2/(1+2z). F'(0+) = 2 - r, F'(inf) = 0.
double aux_f_prime(double z, double r);

// R(r) = (2 - e^(-r))^2. A feasible equilibrium exists iff v < R(r).
double feasibility_threshold(double r);

// Hybrid solve: when v < R(r) the bracket (1e-12, min(e^r - 1, z_max)) is
// tried first (F is negative at the left end and positive at z_min, so the
// direct bracket works whenever z_min fits inside the window); otherwise a
// log-spaced grid of `grid_nodes` points on [1e-12, z_max] is scanned for a
// sign change. Either bracket is refined by Brent's method to
// |F| < 1e-12 and width < 1e-12 (1 + z). No sign change within z_max yields
// verdict NoRootFound, even when feasibility says a root exists further out.
EquilibriumResult solve_equilibrium(Params p, double z_max = kDefaultZMax,
                                    std::size_t grid_nodes = kDefaultBracketNodes);

// Strict sign alternations of F over a log-spaced grid of grid_n >= 64
// points on [1e-12, z_max]. An exact zero at a node counts as one root.
std::size_t count_roots(Params p, double z_max = kDefaultZMax,
                        std::size_t grid_n = 4096);

// Phi(z) = ln(1+2z)/ln(1+z) and derivatives. Direct quotient forms switch to
// Taylor series near zero where cancellation dominates: phi and phi_prime
// below z = 1e-4, phi_second below z = 0.02 (the second derivative loses
// digits much earlier; measured ~5e-13 relative at the switch).
// Limits: Phi(0+) = 2, Phi'(0+) = -1, Phi''(0+) = 3. Domain error for z <= 0.
double phi(double z);
double phi_prime(double z);
double phi_second(double z);

// H(z) = (1+2z)^2 Phi''(z), H(0+) = 3, H -> 0 like 4 ln 2/(ln z)^2.
// Series below z = 0.02.
double h_func(double z);

// Q(z), the numerator of -H'(z): positive for all z > 0. The direct closed
// form is hopeless in double precision near zero (wrong sign below z ~ 1e-4),
// so the series over z^4 is used below z = 0.1.
double q_func(double z);

// H'(z) = -Q(z) / ((1+z)^3 (1+2z) ln(1+z)^4) < 0. Series below z = 1e-4.
double h_func_prime(double z);

}  // namespace ricker
