#include "ricker/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ricker {

namespace {

void require_positive_z(double z) {
    if (!(z > 0))
        throw std::domain_error("z must be positive");
}

// Taylor coefficients around z = 0 (exact rationals rounded once to double;
// radius of convergence 1/2, so truncation is negligible at every switch
// point used below).

// Phi(z) = 2 - z + 3/2 z^2 - ...
constexpr double kPhiSeries[] = {2.0, -1.0, 1.5, -2.4166666666666665, 4.041666666666667, -6.9319444444444445, 12.115972222222222, -21.4947585978836, 38.59724702380952, -70.00361469356261, 128.0341045249118, -235.8425702732517, 437.09008323667393, -814.3603227693827, 1524.2926344591135, -2864.74342428387, 5403.411323052552, -10224.597439922663};

constexpr double kPhiPrimeSeries[] = {-1.0, 3.0, -7.25, 16.166666666666668, -34.65972222222222, 72.69583333333334, -150.46331018518518, 308.7779761904762, -630.0325322420634, 1280.3410452491182, -2594.2682730057686, 5245.080998840087, -10586.684196001976, 21340.096882427588, -42971.15136425805, 86454.58116884083, -173818.15647868527};

constexpr double kPhiSecondSeries[] = {3.0, -14.5, 48.5, -138.63888888888889, 363.4791666666667, -902.7798611111111, 2161.445833333333, -5040.2602579365075, 11523.069407242063, -25942.682730057688, 57695.890987240964, -127040.2103520237, 277421.2594715587, -601596.1190996127, 1296818.7175326124, -2781090.5036589643};

constexpr double kHSeries[] = {3.0, -2.5, 2.5, -2.638888888888889, 2.923611111111111, -3.41875, 4.243055555555555, -5.5963690476190475, 7.811708829365079, -11.446132835464432, 17.437695978468547, -27.377323290599207, 43.982012427709755, -71.92262147285604, 119.27902039629181, -200.1099269655004};

// Q(z)/z^4 (Q itself vanishes to fourth order).
constexpr double kQSeriesOverZ4[] = {2.5, 2.5, -2.5, 2.0555555555555554, -1.7361111111111112, 1.6712962962962963, -1.965132275132275, 2.7942328042328044, -4.478544973544974, 7.586746031746031, -13.118913626056484, 22.82962509448224, -39.8018930712145, 69.46983345622631, -121.44683091159281, 212.80445583517013};

constexpr double kHPrimeSeries[] = {-2.5, 5.0, -7.916666666666667, 11.694444444444445, -17.09375, 25.458333333333332, -39.17458333333333, 62.49367063492063, -103.0151955191799, 174.37695978468548, -301.1505561965913, 527.7841491325171, -934.9940791471286, 1669.9062855480854, -3001.6489044825057};

template <std::size_t N>
double horner(const double (&c)[N], double z) {
    double acc = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) acc = acc * z + c[i];
    return acc;
}

// Cancellation thresholds, measured against a 50-digit reference: below each
// switch the direct quotient forms lose more than the series truncates.
constexpr double kPhiSwitch = 1e-4;
constexpr double kPhiSecondSwitch = 0.02;
constexpr double kQSwitch = 0.1;

}  // namespace

double phi(double z) {
    require_positive_z(z);
    if (z < kPhiSwitch) return horner(kPhiSeries, z);
    return std::log1p(2.0 * z) / std::log1p(z);
}

double phi_prime(double z) {
    require_positive_z(z);
    if (z < kPhiSwitch) return horner(kPhiPrimeSeries, z);
    const double g = std::log1p(z);
    const double h = std::log1p(2.0 * z);
    return (2.0 * (1.0 + z) * g - (1.0 + 2.0 * z) * h) /
           ((1.0 + z) * (1.0 + 2.0 * z) * g * g);
}

double phi_second(double z) {
    require_positive_z(z);
    if (z < kPhiSecondSwitch) return horner(kPhiSecondSeries, z);
    const double g = std::log1p(z);
    const double h = std::log1p(2.0 * z);
    const double w1 = 1.0 + z;
    const double w2 = 1.0 + 2.0 * z;
    const double num = w2 * w2 * (g + 2.0) * h - 4.0 * w1 * (w1 * g + w2) * g;
    return num / (w1 * w1 * w2 * w2 * g * g * g);
}

double h_func(double z) {
    require_positive_z(z);
    if (z < kPhiSecondSwitch) return horner(kHSeries, z);
    const double g = std::log1p(z);
    const double h = std::log1p(2.0 * z);
    const double w1 = 1.0 + z;
    const double w2 = 1.0 + 2.0 * z;
    const double num = w2 * w2 * (g + 2.0) * h - 4.0 * w1 * (w1 * g + w2) * g;
    return num / (w1 * w1 * g * g * g);
}

double q_func(double z) {
    require_positive_z(z);
    if (z < kQSwitch) {
        const double z2 = z * z;
        return z2 * z2 * horner(kQSeriesOverZ4, z);
    }
    const double g = std::log1p(z);
    const double h = std::log1p(2.0 * z);
    const double w1 = 1.0 + z;
    const double w2 = 1.0 + 2.0 * z;
    return 2.0 * w2 * w2 * h * (3.0 * w2 + (2.0 * z - 1.0) * g - g * g) -
           2.0 * w1 * w2 * g * (6.0 * w2 + (1.0 + 4.0 * z) * g);
}

double h_func_prime(double z) {
    require_positive_z(z);
    if (z < kPhiSwitch) return horner(kHPrimeSeries, z);
    const double g = std::log1p(z);
    const double w1 = 1.0 + z;
    const double g2 = g * g;
    return -q_func(z) / (w1 * w1 * w1 * (1.0 + 2.0 * z) * g2 * g2);
}

double aux_f(double z, double r, double v) {
    require_positive_z(z);
    if (!(r > 0)) throw std::domain_error("aux_f: r must be positive");
    if (!(v > 1)) throw std::domain_error("aux_f: v must exceed 1");
    if (z < 1e-8) {
        // F = -ln v + (2-r) z + (3r/2 - 2) z^2 + O(z^3); the direct form
        // divides two quantities that both vanish.
        return -std::log(v) + (2.0 - r) * z + (1.5 * r - 2.0) * z * z;
    }
    const double g = std::log1p(z);
    const double h = std::log1p(2.0 * z);
    return (r / g + 1.0) * h - 2.0 * r - std::log(v);
}

double aux_f_prime(double z, double r) {
    require_positive_z(z);
    if (!(r > 0)) throw std::domain_error("aux_f_prime: r must be positive");
    return r * phi_prime(z) + 2.0 / (1.0 + 2.0 * z);
}

double feasibility_threshold(double r) {
    if (!(r > 0))
        throw std::domain_error("feasibility_threshold: r must be positive");
    const double b = 2.0 - std::exp(-r);
    return b * b;
}

const char* to_string(EquilibriumVerdict v) {
    switch (v) {
        case EquilibriumVerdict::FeasibleUnique: return "FeasibleUnique";
        case EquilibriumVerdict::InfeasibleRoot: return "InfeasibleRoot";
        case EquilibriumVerdict::NoRootFound: return "NoRootFound";
    }
    return "?";
}

namespace {

constexpr double kZLow = 1e-12;      // left end of every search interval
constexpr double kFTol = 1e-12;      // |F| at an accepted root
constexpr double kWidthTol = 1e-12;  // bracket width, scaled by 1+z
constexpr int kBrentMaxIter = 200;

// Brent's method on [a, b] with f(a), f(b) of opposite sign. Converges to
// |f| < kFTol and width < kWidthTol*(1+z); returns the best endpoint either
// way (the caller records the residual).
template <typename F>
double brent(F f, double a, double b, double fa, double fb) {
    if (std::fabs(fa) < std::fabs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa;
    bool mflag = true;
    double d = 0;

    for (int it = 0; it < kBrentMaxIter; ++it) {
        if (std::fabs(fb) < kFTol &&
            std::fabs(b - a) < kWidthTol * (1.0 + std::fabs(b)))
            break;
        double s;
        if (fa != fc && fb != fc) {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);  // secant
        }
        const double lo = (3.0 * a + b) / 4.0;
        const bool out_of_range = !((s > std::min(lo, b)) && (s < std::max(lo, b)));
        const double eps_b = kWidthTol * (1.0 + std::fabs(b));
        if (out_of_range ||
            (mflag && std::fabs(s - b) >= std::fabs(b - c) / 2.0) ||
            (!mflag && std::fabs(s - b) >= std::fabs(c - d) / 2.0) ||
            (mflag && std::fabs(b - c) < eps_b) ||
            (!mflag && std::fabs(c - d) < eps_b)) {
            s = (a + b) / 2.0;
            mflag = true;
        } else {
            mflag = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::fabs(fa) < std::fabs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

// Log-spaced grid node i of n on [kZLow, z_max].
double log_node(std::size_t i, std::size_t n, double z_max) {
    if (i == 0) return kZLow;
    if (i == n - 1) return z_max;
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    return std::exp(std::log(kZLow) + t * (std::log(z_max) - std::log(kZLow)));
}

}  // namespace

EquilibriumResult solve_equilibrium(Params p, double z_max,
                                    std::size_t grid_nodes) {
    if (!(p.r > 0) || !std::isfinite(p.r))
        throw std::domain_error("solve_equilibrium: r must be positive");
    if (!(p.v > 1) || !std::isfinite(p.v))
        throw std::domain_error("solve_equilibrium: v must exceed 1");
    if (!(z_max > kZLow))
        throw std::domain_error("solve_equilibrium: z_max too small");
    if (grid_nodes < 64)
        throw std::domain_error("solve_equilibrium: grid_nodes must be >= 64");

    const auto f = [&](double z) { return aux_f(z, p.r, p.v); };

    EquilibriumResult res;
    res.z_min = std::expm1(p.r);
    res.f_residual = std::numeric_limits<double>::quiet_NaN();

    double root = std::numeric_limits<double>::quiet_NaN();

    // F(0+) = -ln v < 0 and F(z_min) > 0 exactly when v < R(r), so the
    // feasible side never needs the grid. The search window still ends at
    // z_max: a root beyond it (large r pushes z_min ~ e^r) is reported as
    // NoRootFound rather than silently searched past the cap, and the cap
    // also keeps the bracket finite when expm1(r) overflows.
    bool bracketed = false;
    if (p.v < feasibility_threshold(p.r)) {
        const double hi = std::min(res.z_min, z_max);
        const double fa = f(kZLow);
        const double fb = f(hi);
        if (fa < 0 && fb > 0) {
            root = brent(f, kZLow, hi, fa, fb);
            bracketed = true;
        }
    }
    if (!bracketed) {
        double za = kZLow, fa = f(za);
        for (std::size_t i = 1; i < grid_nodes; ++i) {
            const double zb = log_node(i, grid_nodes, z_max);
            const double fb = f(zb);
            if (fa == 0) {
                root = za;
                bracketed = true;
                break;
            }
            if (fa * fb < 0) {
                root = brent(f, za, zb, fa, fb);
                bracketed = true;
                break;
            }
            za = zb;
            fa = fb;
        }
        if (!bracketed && f(z_max) == 0) {
            root = z_max;
            bracketed = true;
        }
    }

    if (!bracketed) {
        res.verdict = EquilibriumVerdict::NoRootFound;
        return res;
    }

    res.z_star = root;
    res.f_residual = std::fabs(f(root));

    const double g = std::log1p(root);
    const double d = p.r - g;
    res.boundary = std::fabs(d) <= 1e-9 * p.r;
    if (d > 0) {
        res.verdict = EquilibriumVerdict::FeasibleUnique;
        res.feasible = true;
        const double mu = root * d / (p.r * g);
        res.mu_star = mu;
        res.s_star = mu * root / p.r;
    } else {
        res.verdict = EquilibriumVerdict::InfeasibleRoot;
    }
    return res;
}

std::size_t count_roots(Params p, double z_max, std::size_t grid_n) {
    if (grid_n < 64)
        throw std::domain_error("count_roots: grid_n must be >= 64");
    if (!(p.r > 0) || !(p.v > 1))
        throw std::domain_error("count_roots: invalid params");

    std::size_t count = 0;
    int prev_sign = 0;
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double fz = aux_f(log_node(i, grid_n, z_max), p.r, p.v);
        const int sign = (fz > 0) - (fz < 0);
        if (sign == 0) {
            // node exactly on a root: count it, restart sign tracking
            ++count;
            prev_sign = 0;
            continue;
        }
        if (prev_sign != 0 && sign != prev_sign) ++count;
        prev_sign = sign;
    }
    return count;
}

}  // namespace ricker
