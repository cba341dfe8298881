#include "ricker/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _WIN32
#include <process.h>
#define getpid _getpid
#else
#include <unistd.h>
#endif

namespace ricker {

using ordered_json = nlohmann::ordered_json;

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("atomic_write: cannot open " + tmp);
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("atomic_write: short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("atomic_write: rename to " + path + " failed");
    }
}

std::string trajectory_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "n,mu,s\n";
    for (std::size_t n = 0; n < t.states.size(); ++n)
        out << n << ',' << format_g17(t.states[n].mu) << ','
            << format_g17(t.states[n].s) << '\n';
    if (t.reason == TerminationReason::Breakdown)
        out << "# breakdown at n=" << t.states.size() << '\n';
    else if (t.reason == TerminationReason::NumericFailure)
        out << "# numeric failure at n=" << t.states.size() << '\n';
    return out.str();
}

std::string ensemble_csv(const EnsembleStats& s) {
    std::ostringstream out;
    out << "n,mean,var\n";
    for (std::size_t n = 0; n < s.mean_series.size(); ++n)
        out << n << ',' << format_g17(s.mean_series[n]) << ','
            << format_g17(s.var_series[n]) << '\n';
    return out.str();
}

namespace {

ordered_json json_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

ordered_json histogram_json(const Histogram& h) {
    ordered_json j;
    j["edges"] = h.edges;
    j["density"] = h.density;
    j["beyond"] = h.beyond;
    j["total"] = h.total;
    return j;
}

}  // namespace

std::string ensemble_json(const EnsembleStats& s, const EnsembleConfig& cfg) {
    ordered_json j;
    j["config"] = {
        {"r", cfg.p.r},
        {"v", cfg.p.v},
        {"n_ens", cfg.n_ens},
        {"t_max", cfg.t_max},
        {"transient", cfg.transient},
        {"collect", cfg.collect},
        {"seed", cfg.seed},
        {"init_mu", cfg.init_mu},
        {"init_s", cfg.init_s},
        {"conv_window", cfg.conv_window},
        {"conv_tol", cfg.conv_tol},
        {"noise", cfg.noise == NoiseKind::Lognormal ? "lognormal" : "none"},
        {"hist_bins", cfg.hist_bins},
    };
    j["converged"] = s.converged;
    j["final_cv"] = json_or_null(s.final_cv);
    j["stationary_mean"] = json_or_null(s.stationary_mean);
    j["stationary_var"] = json_or_null(s.stationary_var);
    j["excluded"] = s.excluded;
    j["extinct"] = s.extinct;
    j["noise_moments"] = {
        {"mean", s.noise_mean},
        {"second", s.noise_m2},
        {"count", s.noise_count},
    };
    j["histogram"] = histogram_json(s.stationary_hist);
    return j.dump(2) + "\n";
}

std::string comparison_json(const DistributionComparison& c, double mu_model,
                            double s_model) {
    ordered_json j;
    j["model"] = {{"mu", mu_model}, {"s", s_model}};
    j["l1_distance"] = c.l1_distance;
    j["mean_rel_err"] = c.mean_rel_err;
    j["var_rel_err"] = c.var_rel_err;
    j["q95_empirical"] = c.q95_empirical;
    j["q95_model"] = c.q95_model;
    j["tail_q95_rel_err"] = c.tail_q95_rel_err;
    return j.dump(2) + "\n";
}

std::string equilibrium_json(const EquilibriumResult& res, Params p,
                             double z_max) {
    ordered_json j;
    j["r"] = p.r;
    j["v"] = p.v;
    j["z_max"] = z_max;
    j["verdict"] = to_string(res.verdict);
    j["feasible"] = res.feasible;
    j["boundary"] = res.boundary;
    j["z_star"] = res.z_star ? ordered_json(*res.z_star) : ordered_json(nullptr);
    j["mu_star"] =
        res.mu_star ? ordered_json(*res.mu_star) : ordered_json(nullptr);
    j["s_star"] = res.s_star ? ordered_json(*res.s_star) : ordered_json(nullptr);
    j["z_min"] = res.z_min;
    j["f_residual"] = json_or_null(res.f_residual);
    return j.dump(2) + "\n";
}

std::string scan_csv(const ScanGrid& g) {
    std::ostringstream out;
    out << "r,v,verdict,z_star,mu_star,s_star,stable\n";
    for (std::size_t iv = 0; iv < g.nv(); ++iv)
        for (std::size_t ir = 0; ir < g.nr(); ++ir) {
            const ScanCell& c = g.at(ir, iv);
            out << format_g17(g.r_axis[ir]) << ',' << format_g17(g.v_axis[iv])
                << ',' << to_string(c.verdict) << ',';
            if (c.z_star) out << format_g17(*c.z_star);
            out << ',';
            if (c.mu_star) out << format_g17(*c.mu_star);
            out << ',';
            if (c.s_star) out << format_g17(*c.s_star);
            out << ',';
            if (c.stable) out << (*c.stable ? "true" : "false");
            out << '\n';
        }
    return out.str();
}

std::string scan_sidecar_json(const ScanGrid& g, bool stamp) {
    ordered_json j;
    j["kind"] = g.kind == ScanGrid::Kind::Existence ? "existence" : "stability";
    j["nr"] = g.nr();
    j["nv"] = g.nv();
    j["r_axis"] = g.r_axis;
    j["v_axis"] = g.v_axis;
    j["z_max"] = g.z_max;
    j["seed_free"] = true;

    ordered_json counts = ordered_json::object();
    for (const auto& c : g.cells) {
        const std::string key = to_string(c.verdict);
        counts[key] = counts.value(key, 0) + 1;
    }
    j["verdict_counts"] = counts;

    const BoundaryError be = boundary_error(g);
    if (be.empty()) {
        j["boundary_error"] = nullptr;
    } else {
        j["boundary_error"] = {
            {"max_abs_dev", be.max_abs_dev},
            {"columns_with_flip", be.columns_with_flip},
            {"columns_skipped", be.columns_skipped},
        };
    }

    if (stamp) {
        char buf[64];
        std::time_t now = std::time(nullptr);
        std::tm tm{};
#ifdef _WIN32
        gmtime_s(&tm, &now);
#else
        gmtime_r(&now, &tm);
#endif
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["timestamp"] = buf;
    } else {
        j["timestamp"] = nullptr;  // byte-identical reruns by default
    }
    return j.dump(2) + "\n";
}

namespace {

const char* verdict_color(CellVerdict v) {
    switch (v) {
        case CellVerdict::FeasibleUnique: return "#2a9d4e";
        case CellVerdict::StableFeasible: return "#2a9d4e";
        case CellVerdict::UnstableFeasible: return "#e0a800";
        case CellVerdict::InfeasibleRoot: return "#b8b8b8";
        case CellVerdict::NoRootFound: return "#d62828";
        case CellVerdict::StabilityUndefined: return "#7b2cbf";
    }
    return "#000000";
}

std::string embed_csv(const std::string& csv) {
    return "<metadata id=\"data-csv\"><![CDATA[" + csv + "]]></metadata>\n";
}

}  // namespace

std::string extract_embedded_csv(const std::string& svg) {
    const std::string open = "<metadata id=\"data-csv\"><![CDATA[";
    const std::string close = "]]></metadata>";
    const auto a = svg.find(open);
    if (a == std::string::npos) return "";
    const auto b = svg.find(close, a);
    if (b == std::string::npos) return "";
    return svg.substr(a + open.size(), b - a - open.size());
}

std::string scan_svg(const ScanGrid& g) {
    const double plot_w = 640, plot_h = 480, margin = 60;
    const std::size_t nr = g.nr(), nv = g.nv();
    const double cw = plot_w / static_cast<double>(nr);
    const double ch = plot_h / static_cast<double>(nv);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << plot_w + 2 * margin << "\" height=\"" << plot_h + 2 * margin
        << "\">\n";
    out << embed_csv(scan_csv(g));
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (std::size_t iv = 0; iv < nv; ++iv)
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const double x = margin + static_cast<double>(ir) * cw;
            // v grows upward
            const double y =
                margin + plot_h - static_cast<double>(iv + 1) * ch;
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
                << "\" height=\"" << ch << "\" fill=\""
                << verdict_color(g.at(ir, iv).verdict) << "\"/>\n";
        }
    out << "<text x=\"" << margin + plot_w / 2 << "\" y=\""
        << plot_h + 2 * margin - 15
        << "\" text-anchor=\"middle\" font-size=\"14\">r</text>\n";
    out << "<text x=\"20\" y=\"" << margin + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"14\">v</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string ensemble_svg(const EnsembleStats& s) {
    const double plot_w = 640, plot_h = 220, margin = 50, gap = 40;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << plot_w + 2 * margin << "\" height=\""
        << 2 * plot_h + 2 * margin + gap << "\">\n";
    out << embed_csv(ensemble_csv(s));

    // top panel: ensemble mean per step
    double max_mean = 0;
    for (double m : s.mean_series)
        if (std::isfinite(m)) max_mean = std::max(max_mean, m);
    if (max_mean <= 0) max_mean = 1;
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333\"/>\n<polyline fill=\"none\" "
           "stroke=\"#1f6fb2\" stroke-width=\"1\" points=\"";
    const std::size_t n = s.mean_series.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.mean_series[i])) continue;
        const double x =
            margin + plot_w * static_cast<double>(i) /
                         static_cast<double>(n > 1 ? n - 1 : 1);
        const double y =
            margin + plot_h - plot_h * s.mean_series[i] / (1.1 * max_mean);
        out << x << ',' << y << ' ';
    }
    out << "\"/>\n";

    // bottom panel: stationary histogram
    const Histogram& h = s.stationary_hist;
    const double y0 = margin + plot_h + gap;
    out << "<rect x=\"" << margin << "\" y=\"" << y0 << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    if (!h.density.empty()) {
        double dmax = 0;
        for (double d : h.density) dmax = std::max(dmax, d);
        if (dmax <= 0) dmax = 1;
        const double bw = plot_w / static_cast<double>(h.density.size());
        for (std::size_t b = 0; b < h.density.size(); ++b) {
            const double bh = plot_h * h.density[b] / (1.05 * dmax);
            out << "<rect x=\"" << margin + static_cast<double>(b) * bw
                << "\" y=\"" << y0 + plot_h - bh << "\" width=\"" << bw
                << "\" height=\"" << bh << "\" fill=\"#888\"/>\n";
        }
    }
    out << "<text x=\"" << margin + plot_w / 2 << "\" y=\""
        << 2 * plot_h + 2 * margin + gap - 10
        << "\" text-anchor=\"middle\" font-size=\"13\">stationary state</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace ricker
