#include "ricker/gamma_kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ricker {

GammaShape gamma_from_moments(double mu, double s) {
    if (!(mu > 0) || !std::isfinite(mu))
        throw std::domain_error("gamma_from_moments: mu must be positive, got " +
                                std::to_string(mu));
    if (!(s > 0) || !std::isfinite(s))
        throw std::domain_error("gamma_from_moments: s must be positive, got " +
                                std::to_string(s));
    return {mu * mu / s, s / mu};
}

double laplace_moment(double mu, double s, double tau, int n) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("laplace_moment: order must be 1 or 2, got " +
                                    std::to_string(n));
    if (!(tau >= 0) || !std::isfinite(tau))
        throw std::domain_error("laplace_moment: tau must be >= 0, got " +
                                std::to_string(tau));
    const GammaShape sh = gamma_from_moments(mu, s);
    // (1 + tau*theta)^(k+n) done in the log domain: k can be ~1e16 in the
    // small-variance regime and pow would round 1+tau*theta first.
    const double lg = std::log1p(tau * sh.theta);
    if (n == 1) return mu * std::exp(-(sh.k + 1.0) * lg);
    return (mu * mu + s) * std::exp(-(sh.k + 2.0) * lg);
}

double gamma_pdf(double x, GammaShape shape) {
    if (!(x >= 0))
        throw std::domain_error("gamma_pdf: x must be >= 0");
    if (!(shape.k > 0) || !(shape.theta > 0))
        throw std::domain_error("gamma_pdf: invalid shape");
    if (x == 0) {
        if (shape.k > 1) return 0.0;
        if (shape.k == 1) return 1.0 / shape.theta;
        return std::numeric_limits<double>::infinity();
    }
    const double logp = (shape.k - 1.0) * std::log(x) - x / shape.theta -
                        log_gamma(shape.k) - shape.k * std::log(shape.theta);
    return std::exp(logp);
}

namespace {

// Lanczos g = 7, 9 terms (Godfrey's coefficients).
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double log_gamma_lanczos(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    constexpr double half_log_2pi = 0.91893853320467274178;
    return half_log_2pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0))
        throw std::domain_error("log_gamma: x must be positive");
    if (x < 0.5) {
        // reflection keeps the series argument away from the poles
        constexpr double log_pi = 1.1447298858494001741;
        return log_pi - std::log(std::sin(M_PI * x)) - log_gamma_lanczos(1.0 - x);
    }
    return log_gamma_lanczos(x);
}

}  // namespace ricker
