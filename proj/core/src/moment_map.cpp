#include "ricker/moment_map.hpp"

#include <cmath>
#include <limits>

#include "ricker/gamma_kernels.hpp"

namespace ricker {

namespace {

void check_params(Params p) {
    if (!(p.r > 0) || !std::isfinite(p.r))
        throw std::domain_error("Params: r must be positive, got " +
                                std::to_string(p.r));
    if (!(p.v > 1) || !std::isfinite(p.v))
        throw std::domain_error("Params: v must exceed 1, got " +
                                std::to_string(p.v));
}

void check_state(MomentState st) {
    if (!(st.mu > 0) || !std::isfinite(st.mu))
        throw std::domain_error("MomentState: mu must be positive, got " +
                                std::to_string(st.mu));
    if (!(st.s > 0) || !std::isfinite(st.s))
        throw std::domain_error("MomentState: s must be positive, got " +
                                std::to_string(st.s));
}

}  // namespace

StepOutcome step(MomentState state, Params p) {
    check_state(state);
    check_params(p);

    const double mu1 = std::exp(p.r) * laplace_moment(state.mu, state.s, p.r, 1);
    const double m2 =
        p.v * std::exp(2.0 * p.r) * laplace_moment(state.mu, state.s, 2.0 * p.r, 2);
    const double s1 = m2 - mu1 * mu1;

    if (!std::isfinite(mu1) || !std::isfinite(m2) || !std::isfinite(s1))
        throw numeric_failure("step: non-finite intermediate", state, p);

    StepOutcome out;
    out.raw_mu = mu1;
    out.raw_s = s1;
    out.raw_second_moment = m2;
    if (mu1 > 0 && s1 > 0) out.next = MomentState{mu1, s1};
    return out;
}

Trajectory iterate(MomentState state0, Params p, std::size_t n_steps) {
    check_state(state0);
    check_params(p);

    Trajectory traj;
    traj.states.reserve(n_steps + 1);
    traj.states.push_back(state0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        StepOutcome out;
        try {
            out = step(traj.states.back(), p);
        } catch (const numeric_failure&) {
            traj.reason = TerminationReason::NumericFailure;
            return traj;
        }
        if (out.breakdown()) {
            traj.reason = TerminationReason::Breakdown;
            traj.fault = out;
            return traj;
        }
        traj.states.push_back(*out.next);
    }
    return traj;
}

double classical_ricker_step(double x, double r) {
    if (!(x > 0))
        throw std::domain_error("classical_ricker_step: x must be positive");
    return x * std::exp(r * (1.0 - x));
}

LimitGap deterministic_limit_gap(double mu0, double r, double eps_v,
                                 double eps_s, std::size_t n_steps) {
    if (!(mu0 > 0) || !(r > 0))
        throw std::domain_error("deterministic_limit_gap: mu0 and r must be positive");
    if (!(eps_v > 0) || eps_v > 1e-4 || !(eps_s > 0) || eps_s > 1e-4)
        throw std::domain_error(
            "deterministic_limit_gap: eps_v, eps_s must lie in (0, 1e-4]");

    const Params p{r, 1.0 + eps_v};
    MomentState st{mu0, eps_s * mu0 * mu0};
    double x = mu0;

    LimitGap gap;
    for (std::size_t n = 0; n < n_steps; ++n) {
        StepOutcome out;
        try {
            out = step(st, p);
        } catch (const numeric_failure&) {
            gap.max_gap = std::numeric_limits<double>::infinity();
            gap.reason = TerminationReason::NumericFailure;
            return gap;
        }
        if (out.breakdown()) {
            gap.max_gap = std::numeric_limits<double>::infinity();
            gap.reason = TerminationReason::Breakdown;
            return gap;
        }
        st = *out.next;
        x = classical_ricker_step(x, r);
        gap.max_gap = std::max(gap.max_gap, std::fabs(st.mu - x));
        gap.steps_run = n + 1;
    }
    return gap;
}

}  // namespace ricker
