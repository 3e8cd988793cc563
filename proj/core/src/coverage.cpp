#include "drain/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "drain/errors.hpp"

namespace drain::eval {

namespace {

std::string edge_label(double v)
{
    return format_number(v);
}

std::string bin_label(double lo, double hi)
{
    if (std::isinf(hi)) {
        return edge_label(lo) + " and above";
    }
    return edge_label(lo) + " to " + edge_label(hi);
}

double percent(std::size_t k, std::size_t n)
{
    return n ? 100.0 * static_cast<double>(k) / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

CoverageTable coverage_table(const BandPixels& px, std::span<const double> edges, double threshold)
{
    const std::size_t n = px.ref.size();
    if (px.est.size() != n || px.lo50.size() != n || px.hi50.size() != n || px.lo90.size() != n ||
        px.hi90.size() != n) {
        throw UsageError("coverage inputs have different pixel counts");
    }
    if (edges.size() < 2) {
        throw UsageError("coverage needs at least one bin");
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (!(edges[k] > edges[k - 1])) {
            throw UsageError("coverage bin edges must be strictly increasing");
        }
    }
    const std::size_t bins = edges.size() - 1;
    std::vector<std::size_t> count(bins + 1, 0), in50(bins + 1, 0), in90(bins + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const float r = px.ref[i];
        if (!quantiles::is_rain(r, threshold) || !quantiles::is_rain(px.est[i], threshold)) {
            continue;
        }
        const double rv = r;
        if (!(rv >= edges.front()) || !(rv < edges.back())) {
            continue;
        }
        const auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), rv) - edges.begin()) - 1;
        const bool c50 = px.lo50[i] <= r && r <= px.hi50[i];
        const bool c90 = px.lo90[i] <= r && r <= px.hi90[i];
        for (const std::size_t slot : {k, bins}) {
            ++count[slot];
            in50[slot] += c50;
            in90[slot] += c90;
        }
    }
    CoverageTable t;
    for (std::size_t k = 0; k <= bins; ++k) {
        CoverageRow row;
        row.label = k < bins ? bin_label(edges[k], edges[k + 1]) : "All";
        row.n = count[k];
        row.coverage50 = percent(in50[k], count[k]);
        row.coverage90 = percent(in90[k], count[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

CoverageTable coverage_table(const QuantileField& qf, const RainField& ref, std::span<const double> edges,
                             double threshold)
{
    if (!qf.geo().same_grid(ref.geo())) {
        throw UsageError("quantile field and reference are on different grids");
    }
    const auto median = quantiles::point_estimate(qf, 0.5);
    const auto b50 = quantiles::confidence_band(qf, 0.5);
    const auto b90 = quantiles::confidence_band(qf, 0.9);
    const BandPixels px{median.values(),      ref.values(),         b50.lower.values(),
                        b50.upper.values(),   b90.lower.values(),   b90.upper.values()};
    return coverage_table(px, edges, threshold);
}

CsvTable coverage_csv(const CoverageTable& t)
{
    CsvTable csv({"rain_interval", "n", "coverage_50", "coverage_90"});
    for (const auto& r : t.rows) {
        csv.row({r.label, std::to_string(r.n), format_number(r.coverage50), format_number(r.coverage90)});
    }
    return csv;
}

}  // namespace drain::eval
