#include "ricker/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ricker/parallel.hpp"

namespace ricker {

double sample_gamma(GammaShape shape, Xoshiro256pp& rng) {
    if (!(shape.k > 0) || !(shape.theta > 0))
        throw std::domain_error("sample_gamma: invalid shape");

    // Marsaglia-Tsang: k < 1 is boosted through Gamma(k+1) * U^(1/k).
    double boost = 1.0;
    double k = shape.k;
    if (k < 1.0) {
        boost = std::pow(rng.uniform01(), 1.0 / k);
        k += 1.0;
    }
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, w;
        do {
            x = rng.normal();
            w = 1.0 + c * x;
        } while (w <= 0.0);
        w = w * w * w;
        const double u = rng.uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return boost * d * w * shape.theta;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - w + std::log(w)))
            return boost * d * w * shape.theta;
    }
}

double sample_lognormal_noise(double v, Xoshiro256pp& rng) {
    if (!(v > 1))
        throw std::domain_error("sample_lognormal_noise: v must exceed 1");
    const double sigma2 = std::log(v);
    const double sigma = std::sqrt(sigma2);
    return std::exp(sigma * rng.normal() - 0.5 * sigma2);
}

Histogram build_histogram(const std::vector<double>& values, std::size_t bins) {
    if (bins < 1) throw std::domain_error("build_histogram: bins must be >= 1");
    Histogram h;
    h.total = values.size();
    if (values.empty()) return h;

    std::vector<double> sorted(values);
    const std::size_t nth =
        static_cast<std::size_t>(0.999 * static_cast<double>(sorted.size() - 1));
    std::nth_element(sorted.begin(), sorted.begin() + nth, sorted.end());
    double hi = sorted[nth];
    if (!(hi > 0)) hi = 1.0;  // degenerate (all mass at zero)

    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.edges[i] = hi * static_cast<double>(i) / static_cast<double>(bins);

    const double width = hi / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : values) {
        if (x > hi) {
            ++h.beyond;
            continue;
        }
        std::size_t b = static_cast<std::size_t>(x / width);
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    const std::size_t in_range = h.total - h.beyond;
    h.density.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        h.density[b] =
            static_cast<double>(counts[b]) / (static_cast<double>(in_range) * width);
    return h;
}

Convergence convergence_check(const std::vector<double>& mean_series,
                              std::size_t window, double tol) {
    if (window < 2)
        throw std::domain_error("convergence_check: window must be >= 2");
    if (window > mean_series.size())
        throw std::domain_error("convergence_check: window exceeds series length");
    const auto tail = mean_series.end() - static_cast<std::ptrdiff_t>(window);
    double m = 0;
    for (std::size_t i = 0; i < window; ++i) m += tail[i];
    m /= static_cast<double>(window);
    if (!(m > 0) || !std::isfinite(m))
        throw std::domain_error("convergence_check: window mean <= 0, CV undefined");
    double ss = 0;
    for (std::size_t i = 0; i < window; ++i) {
        const double d = tail[i] - m;
        ss += d * d;
    }
    const double cv = std::sqrt(ss / static_cast<double>(window - 1)) / m;
    return {cv < tol, cv};
}

namespace {

constexpr double kOverflowCap = 1e308;

struct BlockAcc {
    std::vector<double> sum;       // per step, over contributing trajectories
    std::vector<double> sumsq;
    std::vector<std::size_t> cnt;  // contributing trajectories per step
    double noise_sum = 0;
    double noise_sum2 = 0;
    std::size_t noise_cnt = 0;
    std::size_t excluded = 0;
    std::size_t final_alive = 0;
    std::size_t final_nonzero = 0;
};

void validate(const EnsembleConfig& cfg) {
    if (cfg.n_ens < 1)
        throw std::domain_error("EnsembleConfig: n_ens must be >= 1");
    if (cfg.transient + cfg.collect > cfg.t_max)
        throw std::domain_error("EnsembleConfig: transient + collect must be <= t_max");
    if (!(cfg.conv_tol > 0))
        throw std::domain_error("EnsembleConfig: conv_tol must be positive");
    if (cfg.conv_window < 2 || cfg.conv_window > cfg.t_max + 1)
        throw std::domain_error("EnsembleConfig: conv_window out of range");
    if (!(cfg.init_mu > 0) || !(cfg.init_s > 0))
        throw std::domain_error("EnsembleConfig: initial moments must be positive");
    if (!(cfg.p.r > 0) || !std::isfinite(cfg.p.r))
        throw std::domain_error("EnsembleConfig: r must be positive");
    if (cfg.noise == NoiseKind::Lognormal && !(cfg.p.v > 1))
        throw std::domain_error("EnsembleConfig: v must exceed 1 for lognormal noise");
    if (cfg.hist_bins < 1)
        throw std::domain_error("EnsembleConfig: hist_bins must be >= 1");
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
    validate(cfg);

    const std::size_t n_steps = cfg.t_max + 1;  // including the initial state
    const std::size_t n_blocks = std::min<std::size_t>(kDefaultBlocks, cfg.n_ens);
    const GammaShape init_shape = gamma_from_moments(cfg.init_mu, cfg.init_s);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<BlockAcc> blocks(n_blocks);
    for (auto& b : blocks) {
        b.sum.assign(n_steps, 0.0);
        b.sumsq.assign(n_steps, 0.0);
        b.cnt.assign(n_steps, 0);
    }
    // Collection-window states, one fixed slot per (trajectory, step):
    // writes never race and the pooled ordering is thread-count independent.
    std::vector<double> pool(cfg.n_ens * cfg.collect, nan);

    parallel_for_blocks(
        cfg.n_ens, n_blocks,
        [&](std::size_t bi, std::size_t begin, std::size_t end) {
            BlockAcc& acc = blocks[bi];
            for (std::size_t idx = begin; idx < end; ++idx) {
                Xoshiro256pp rng = Xoshiro256pp::substream(cfg.seed, idx);
                double x = sample_gamma(init_shape, rng);
                acc.sum[0] += x;
                acc.sumsq[0] += x * x;
                ++acc.cnt[0];
                bool overflowed = false;
                for (std::size_t n = 1; n <= cfg.t_max; ++n) {
                    double eps = 1.0;
                    if (cfg.noise == NoiseKind::Lognormal) {
                        eps = sample_lognormal_noise(cfg.p.v, rng);
                        acc.noise_sum += eps;
                        acc.noise_sum2 += eps * eps;
                        ++acc.noise_cnt;
                    }
                    x = x * std::exp(cfg.p.r * (1.0 - x)) * eps;
                    if (!(x <= kOverflowCap)) {  // catches inf and NaN too
                        ++acc.excluded;
                        overflowed = true;
                        break;
                    }
                    acc.sum[n] += x;
                    acc.sumsq[n] += x * x;
                    ++acc.cnt[n];
                    if (n > cfg.transient && n <= cfg.transient + cfg.collect)
                        pool[idx * cfg.collect + (n - cfg.transient - 1)] = x;
                }
                if (!overflowed) {
                    ++acc.final_alive;
                    if (x != 0.0) ++acc.final_nonzero;
                }
            }
        });

    EnsembleStats st;
    st.mean_series.assign(n_steps, nan);
    st.var_series.assign(n_steps, nan);

    // serial reduction in block order: identical for every worker count
    for (std::size_t n = 0; n < n_steps; ++n) {
        double sum = 0, sumsq = 0;
        std::size_t cnt = 0;
        for (const auto& b : blocks) {
            sum += b.sum[n];
            sumsq += b.sumsq[n];
            cnt += b.cnt[n];
        }
        if (cnt == 0) continue;
        const double mean = sum / static_cast<double>(cnt);
        st.mean_series[n] = mean;
        st.var_series[n] =
            std::max(0.0, sumsq / static_cast<double>(cnt) - mean * mean);
    }

    double noise_sum = 0, noise_sum2 = 0;
    std::size_t final_alive = 0, final_nonzero = 0;
    for (const auto& b : blocks) {
        noise_sum += b.noise_sum;
        noise_sum2 += b.noise_sum2;
        st.noise_count += b.noise_cnt;
        st.excluded += b.excluded;
        final_alive += b.final_alive;
        final_nonzero += b.final_nonzero;
    }
    if (st.noise_count > 0) {
        st.noise_mean = noise_sum / static_cast<double>(st.noise_count);
        st.noise_m2 = noise_sum2 / static_cast<double>(st.noise_count);
    }
    st.extinct = final_alive > 0 && final_nonzero == 0;

    // compact the collection pool (drop slots of excluded trajectories)
    std::vector<double> values;
    values.reserve(pool.size());
    for (double x : pool)
        if (!std::isnan(x)) values.push_back(x);
    if (!values.empty()) {
        double sum = 0;
        for (double x : values) sum += x;
        st.stationary_mean = sum / static_cast<double>(values.size());
        double ss = 0;
        for (double x : values) {
            const double d = x - st.stationary_mean;
            ss += d * d;
        }
        st.stationary_var = ss / static_cast<double>(values.size());
    } else {
        st.stationary_mean = nan;
        st.stationary_var = nan;
    }
    st.stationary_hist = build_histogram(values, cfg.hist_bins);

    // convergence over the trailing window; an extinct or empty window has
    // no defined CV and is simply non-convergent
    st.final_cv = nan;
    const auto tail_begin =
        st.mean_series.end() - static_cast<std::ptrdiff_t>(cfg.conv_window);
    bool window_ok = true;
    double wmean = 0;
    for (auto it = tail_begin; it != st.mean_series.end(); ++it) {
        if (!std::isfinite(*it)) window_ok = false;
        wmean += *it;
    }
    if (window_ok && wmean > 0) {
        const Convergence conv =
            convergence_check(st.mean_series, cfg.conv_window, cfg.conv_tol);
        st.converged = conv.converged;
        st.final_cv = conv.cv;
    }
    return st;
}

namespace {

// Mass of Gamma(shape) over [a, b] by composite Simpson. The k < 1 density
// blows up at 0, so the first interval from 0 uses the substitution
// x = b t^(1/k), under which the integrand becomes b^k/(k Gamma(k) theta^k)
// exp(-(b/theta) t^(1/k)): smooth on [0, 1].
double gamma_bin_mass(GammaShape shape, double a, double b) {
    if (!(b > a)) return 0.0;
    if (shape.k < 1.0 && a <= 0.0) {
        const int n = 32;
        const double hstep = 1.0 / n;
        const double scale = std::exp(shape.k * std::log(b) - log_gamma(shape.k) -
                                      shape.k * std::log(shape.theta)) /
                             shape.k;
        const auto f = [&](double t) {
            return std::exp(-(b / shape.theta) * std::pow(t, 1.0 / shape.k));
        };
        double acc = f(0.0) + f(1.0);
        for (int i = 1; i < n; ++i)
            acc += f(i * hstep) * ((i % 2) ? 4.0 : 2.0);
        return scale * acc * hstep / 3.0;
    }
    const int n = 8;
    const double hstep = (b - a) / n;
    double acc = gamma_pdf(a, shape) + gamma_pdf(b, shape);
    for (int i = 1; i < n; ++i)
        acc += gamma_pdf(a + i * hstep, shape) * ((i % 2) ? 4.0 : 2.0);
    return acc * hstep / 3.0;
}

}  // namespace

DistributionComparison compare_distribution(const EnsembleStats& stats,
                                            double mu, double s) {
    const Histogram& h = stats.stationary_hist;
    if (h.total == 0 || h.density.empty())
        throw std::invalid_argument("compare_distribution: empty histogram");
    const GammaShape shape = gamma_from_moments(mu, s);

    const std::size_t bins = h.density.size();
    const double width = h.edges[1] - h.edges[0];
    const double in_range_frac =
        static_cast<double>(h.total - h.beyond) / static_cast<double>(h.total);

    DistributionComparison cmp;
    cmp.mean_rel_err = std::fabs(stats.stationary_mean - mu) / mu;
    cmp.var_rel_err = std::fabs(stats.stationary_var - s) / s;

    std::vector<double> model(bins);
    for (std::size_t b = 0; b < bins; ++b)
        model[b] = gamma_bin_mass(shape, h.edges[b], h.edges[b + 1]);

    double l1 = 0;
    for (std::size_t b = 0; b < bins; ++b)
        l1 += std::fabs(h.density[b] * width - model[b]);
    cmp.l1_distance = l1;

    // empirical q95, linear within the crossing bin; masses are measured
    // against all pooled samples so the beyond-range tail counts
    {
        double cum = 0;
        cmp.q95_empirical = h.edges.back();
        for (std::size_t b = 0; b < bins; ++b) {
            const double mass = h.density[b] * width * in_range_frac;
            if (cum + mass >= 0.95 && mass > 0) {
                cmp.q95_empirical = h.edges[b] + (0.95 - cum) / mass * width;
                break;
            }
            cum += mass;
        }
    }

    // model q95 on the same lattice, extended past the histogram if the
    // in-range model mass does not reach 0.95
    {
        double cum = 0;
        double a = 0;
        cmp.q95_model = h.edges.back();
        for (std::size_t i = 0; i < bins + 100000; ++i) {
            const double b = a + width;
            const double mass = gamma_bin_mass(shape, a, b);
            if (cum + mass >= 0.95 && mass > 0) {
                cmp.q95_model = a + (0.95 - cum) / mass * width;
                break;
            }
            cum += mass;
            a = b;
        }
    }
    cmp.tail_q95_rel_err =
        std::fabs(cmp.q95_empirical - cmp.q95_model) / cmp.q95_model;
    return cmp;
}

}  // namespace ricker
