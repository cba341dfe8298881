#include "ricker/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace ricker {

namespace {

constexpr double kRelTol = 1e-5;  // acceptance: entry change under halving

// eps^(1/3): the usual central-difference sweet spot between truncation
// (h^2) and roundoff (eps/h).
const double kStepScale = std::cbrt(std::numeric_limits<double>::epsilon());

bool jac_at(const std::function<std::optional<Vec2>(Vec2)>& f, Vec2 x, Vec2 h,
            Mat2& out) {
    for (int j = 0; j < 2; ++j) {
        Vec2 xp = x, xm = x;
        xp[j] += h[j];
        xm[j] -= h[j];
        const auto fp = f(xp);
        const auto fm = f(xm);
        if (!fp || !fm) return false;
        for (int i = 0; i < 2; ++i)
            out[i][j] = ((*fp)[i] - (*fm)[i]) / (2.0 * h[j]);
    }
    return true;
}

bool entries_close(const Mat2& a, const Mat2& b) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double denom = std::max(1.0, std::fabs(b[i][j]));
            if (std::fabs(a[i][j] - b[i][j]) >= kRelTol * denom) return false;
        }
    return true;
}

Mat2 richardson(const Mat2& coarse, const Mat2& fine) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
    return r;
}

}  // namespace

JacobianResult fd_jacobian(const std::function<std::optional<Vec2>(Vec2)>& f,
                           Vec2 point) {
    JacobianResult res;
    const Vec2 h{std::max(std::fabs(point[0]), 1.0) * kStepScale,
                 std::max(std::fabs(point[1]), 1.0) * kStepScale};
    res.fd_step = h;

    Mat2 jh, jh2;
    if (!jac_at(f, point, h, jh) ||
        !jac_at(f, point, {h[0] / 2, h[1] / 2}, jh2)) {
        res.status = JacobianStatus::StencilBreakdown;
        return res;
    }
    res.coarse = jh;
    res.jacobian = jh2;
    if (entries_close(jh, jh2)) {
        res.status = JacobianStatus::Ok;
        return res;
    }

    // one Richardson retry on a further halving
    Mat2 jh4;
    if (!jac_at(f, point, {h[0] / 4, h[1] / 4}, jh4)) {
        res.status = JacobianStatus::StencilBreakdown;
        return res;
    }
    const Mat2 r1 = richardson(jh, jh2);
    const Mat2 r2 = richardson(jh2, jh4);
    res.used_richardson = true;
    res.coarse = r1;
    res.jacobian = r2;
    res.status = entries_close(r1, r2) ? JacobianStatus::Ok
                                       : JacobianStatus::NotConverged;
    return res;
}

JacobianResult numerical_jacobian(MomentState point, Params p) {
    const auto f = [p](Vec2 x) -> std::optional<Vec2> {
        if (!(x[0] > 0) || !(x[1] > 0)) return std::nullopt;
        StepOutcome out;
        try {
            out = step(MomentState{x[0], x[1]}, p);
        } catch (const numeric_failure&) {
            return std::nullopt;
        }
        if (out.breakdown()) return std::nullopt;
        return Vec2{out.next->mu, out.next->s};
    };
    return fd_jacobian(f, {point.mu, point.s});
}

StabilityReport schur_test(const Mat2& j) {
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (!std::isfinite(j[a][b]))
                throw std::domain_error("schur_test: non-finite entry");

    StabilityReport rep;
    rep.jacobian = j;
    rep.trace = j[0][0] + j[1][1];
    rep.det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    rep.schur = {1.0 - rep.trace + rep.det > 0.0,
                 1.0 + rep.trace + rep.det > 0.0,
                 1.0 - rep.det > 0.0};
    rep.stable = rep.schur[0] && rep.schur[1] && rep.schur[2];
    return rep;
}

const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::StableFeasible: return "StableFeasible";
        case CellClass::UnstableFeasible: return "UnstableFeasible";
        case CellClass::InfeasibleRoot: return "InfeasibleRoot";
        case CellClass::NoRootFound: return "NoRootFound";
        case CellClass::StabilityUndefined: return "StabilityUndefined";
    }
    return "?";
}

CellClass classify_at(const EquilibriumResult& eq, Params p) {
    if (eq.verdict == EquilibriumVerdict::NoRootFound)
        return CellClass::NoRootFound;
    if (eq.verdict == EquilibriumVerdict::InfeasibleRoot)
        return CellClass::InfeasibleRoot;

    try {
        const JacobianResult jac =
            numerical_jacobian(MomentState{*eq.mu_star, *eq.s_star}, p);
        if (jac.status != JacobianStatus::Ok) return CellClass::StabilityUndefined;
        const StabilityReport fine = schur_test(jac.jacobian);
        const StabilityReport coarse = schur_test(jac.coarse);
        // a verdict that depends on the difference level is no verdict
        if (fine.stable != coarse.stable) return CellClass::StabilityUndefined;
        return fine.stable ? CellClass::StableFeasible
                           : CellClass::UnstableFeasible;
    } catch (const std::exception&) {
        return CellClass::StabilityUndefined;
    }
}

CellClass classify(Params p, double z_max) {
    if (!(p.r > 0) || !(p.v > 1))
        throw std::domain_error("classify: invalid params");
    EquilibriumResult eq;
    try {
        eq = solve_equilibrium(p, z_max);
    } catch (const std::exception&) {
        return CellClass::StabilityUndefined;
    }
    return classify_at(eq, p);
}

}  // namespace ricker
