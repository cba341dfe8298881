#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ricker {

// Model parameters of the stochastic map X_{n+1} = X_n e^(r(1-X_n)) eps_n
// with E[eps] = 1 and E[eps^2] = v.
struct Params {
    double r;  // growth rate, > 0
    double v;  // noise second moment, > 1 (the deterministic limit is reached
               // only through deterministic_limit_gap, never by setting v = 1)
};

// Mean and variance of the population at one step of the closed recurrence.
struct MomentState {
    double mu;  // > 0
    double s;   // > 0
};

// Result of one application of the closed map. The closure can exit its own
// domain of validity: the raw update may produce mu' <= 0 (underflow of the
// decaying mean) or s' <= 0 (catastrophic cancellation between the second
// moment and the squared mean). That is a reported outcome, not an exception
// and not something to clamp.
struct StepOutcome {
    std::optional<MomentState> next;  // engaged iff the update stayed valid
    double raw_mu = 0;                // mu_{n+1} exactly as computed
    double raw_s = 0;                 // s_{n+1} exactly as computed
    double raw_second_moment = 0;     // E[X_{n+1}^2] as computed

    bool breakdown() const { return !next.has_value(); }
};

// Thrown when an update produces a non-finite intermediate (overflow or NaN);
// carries the inputs that triggered it.
class numeric_failure : public std::runtime_error {
public:
    numeric_failure(const std::string& what, MomentState state, Params p)
        : std::runtime_error(what), state(state), params(p) {}
    MomentState state;
    Params params;
};

// One step of the closed (mu, s) recurrence:
//   mu'  = e^r * E[X e^(-rX)]
//   E2'  = v e^(2r) * E[X^2 e^(-2rX)]
//   s'   = E2' - mu'^2
// with the expectations delegated to laplace_moment under the Gamma ansatz.
// Throws std::domain_error on invalid state/params, numeric_failure on
// non-finite intermediates.
StepOutcome step(MomentState state, Params p);

enum class TerminationReason { Completed, Breakdown, NumericFailure };

struct Trajectory {
    std::vector<MomentState> states;  // states[0] is the initial condition
    TerminationReason reason = TerminationReason::Completed;
    // Engaged when reason == Breakdown; holds the offending raw values.
    std::optional<StepOutcome> fault;
};

// Iterates step() up to n_steps times (n_steps = 0 yields just the initial
// state). Breakdown and numeric failures terminate the trajectory with the
// reason recorded; they never propagate as exceptions.
Trajectory iterate(MomentState state0, Params p, std::size_t n_steps);

// x e^(r(1-x)), the deterministic skeleton of the model.
double classical_ricker_step(double x, double r);

struct LimitGap {
    double max_gap = 0;  // +inf when the moment iteration broke down
    TerminationReason reason = TerminationReason::Completed;
    std::size_t steps_run = 0;
};

// Runs the closed map with v = 1 + eps_v, s0 = eps_s * mu0^2 alongside the
// classical map from x0 = mu0 and returns the largest |mu_n - x_n| over
// n_steps steps. eps_v and eps_s must lie in (0, 1e-4].
LimitGap deterministic_limit_gap(double mu0, double r, double eps_v,
                                 double eps_s, std::size_t n_steps);

}  // namespace ricker
