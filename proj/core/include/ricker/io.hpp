#pragma once

#include <string>

#include "ricker/montecarlo.hpp"
#include "ricker/scan.hpp"

namespace ricker {

// Shortest exact decimal for a double via %.17g; guarantees bit round-trips.
std::string format_g17(double x);

// Writes content to <path>.tmp.<pid> and renames into place, so readers
// never observe a partial file. Throws std::runtime_error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);

// "n,mu,s" rows; a breakdown appends a trailing "# breakdown at n=<k>"
// comment, a numeric failure "# numeric failure at n=<k>".
std::string trajectory_csv(const Trajectory& t);

// "n,mean,var" rows.
std::string ensemble_csv(const EnsembleStats& s);

// Histogram, convergence verdict, stationary moments, excluded-trajectory
// count, pooled noise moments. cfg is echoed so a run is self-describing.
std::string ensemble_json(const EnsembleStats& s, const EnsembleConfig& cfg);

std::string comparison_json(const DistributionComparison& c, double mu_model,
                            double s_model);

std::string equilibrium_json(const EquilibriumResult& res, Params p,
                             double z_max);

// Header r,v,verdict,z_star,mu_star,s_star,stable; one row per cell, v outer,
// r inner; absent values render as empty fields.
std::string scan_csv(const ScanGrid& g);

// Axes, z_max, resolution, verdict counts, boundary-error block (null when
// the grid has no flip). timestamp is null unless `stamp` is set: file
// outputs must be byte-identical across reruns by default.
std::string scan_sidecar_json(const ScanGrid& g, bool stamp = false);

// SVG renderings. Each embeds the matching CSV inside
// <metadata id="data-csv"><![CDATA[...]]></metadata> so the plot is a
// lossless relabeling of the data file.
std::string scan_svg(const ScanGrid& g);
std::string ensemble_svg(const EnsembleStats& s);

// Extracts the CDATA payload written by the emitters above; empty string if
// the marker is missing.
std::string extract_embedded_csv(const std::string& svg);

}  // namespace ricker
