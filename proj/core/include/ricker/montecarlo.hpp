#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ricker/gamma_kernels.hpp"
#include "ricker/moment_map.hpp"
#include "ricker/rng.hpp"

namespace ricker {

// One Gamma(k, theta) draw, Marsaglia-Tsang squeeze method (k >= 1) with the
// u^(1/k) boost for k < 1. Deterministic given the generator state.
double sample_gamma(GammaShape shape, Xoshiro256pp& rng);

// eps = exp(sigma Z - sigma^2/2) with sigma^2 = ln v, so E[eps] = 1 and
// E[eps^2] = v. Throws std::domain_error for v <= 1 (the no-noise mode is a
// separate strategy, not v = 1).
double sample_lognormal_noise(double v, Xoshiro256pp& rng);

enum class NoiseKind {
    Lognormal,  // the model's default
    None,       // eps = 1 exactly; deterministic-limit checks
};

struct EnsembleConfig {
    Params p{};
    std::size_t n_ens = 20000;    // trajectories
    std::size_t t_max = 1500;     // iterations after the initial state
    std::size_t transient = 1000; // burn-in steps excluded from collection
    std::size_t collect = 500;    // collection window; transient+collect <= t_max
    std::uint64_t seed = 1;
    double init_mu = 0.5;         // Gamma initial condition moments
    double init_s = 0.02;
    std::size_t conv_window = 100;  // trailing window for the CV criterion
    double conv_tol = 1e-4;
    NoiseKind noise = NoiseKind::Lognormal;
    std::size_t hist_bins = 200;
};

struct Histogram {
    std::vector<double> edges;    // bins+1 uniform edges on [0, p99.9]
    std::vector<double> density;  // per bin; integrates to 1 over [0, p99.9]
    std::size_t beyond = 0;       // pooled samples above the last edge
    std::size_t total = 0;        // pooled samples overall
};

// Uniform-bin histogram of `values` over [0, empirical 99.9th percentile],
// density normalized over the in-range samples.
Histogram build_histogram(const std::vector<double>& values, std::size_t bins);

struct EnsembleStats {
    std::vector<double> mean_series;  // length t_max+1, entry per step
    std::vector<double> var_series;   // cross-ensemble variance per step
    Histogram stationary_hist;        // states pooled over the collect window
    bool converged = false;
    double final_cv = 0;              // NaN when the window mean is <= 0
    double stationary_mean = 0;       // pooled over the collect window
    double stationary_var = 0;
    std::size_t excluded = 0;  // trajectories dropped after exceeding 1e308
    bool extinct = false;      // every surviving trajectory ended at exactly 0
    // Pooled noise draws across the whole run (the model requires
    // E[eps] = 1, E[eps^2] = v; these let callers check it).
    double noise_mean = 0;
    double noise_m2 = 0;
    std::size_t noise_count = 0;
};

// Evolves n_ens trajectories X <- X e^(r(1-X)) eps with per-trajectory
// substreams of cfg.seed. Output is bit-identical for identical cfg across
// runs and thread counts. Overflowing trajectories (X > 1e308) are excluded
// from that step on and counted; total collapse to zero is reported via
// `extinct`, with stats still returned.
EnsembleStats run_ensemble(const EnsembleConfig& cfg);

struct Convergence {
    bool converged = false;
    double cv = 0;
};

// CV = sample std / mean over the trailing `window` entries, converged iff
// cv < tol. Throws std::domain_error when window < 2, window > series length,
// or the window mean is <= 0 (undefined CV).
Convergence convergence_check(const std::vector<double>& mean_series,
                              std::size_t window, double tol);

struct DistributionComparison {
    double l1_distance = 0;      // sum over bins |empirical - model mass|
    double mean_rel_err = 0;     // |stationary_mean - mu| / mu
    double var_rel_err = 0;      // |stationary_var - s| / s
    double q95_empirical = 0;    // interpolated from the histogram
    double q95_model = 0;        // from the Gamma(mu, s) density
    double tail_q95_rel_err = 0; // |q95_emp - q95_model| / q95_model
};

// Compares the stationary histogram and moments against the Gamma density
// with moments (mu, s); model bin masses by per-bin quadrature of gamma_pdf.
// Throws std::invalid_argument on an empty histogram.
DistributionComparison compare_distribution(const EnsembleStats& stats,
                                            double mu, double s);

}  // namespace ricker
