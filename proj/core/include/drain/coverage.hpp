#pragma once

// Empirical coverage of the retrieved 50% and 90% bands on true positives,
// binned by reference intensity.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "drain/csv.hpp"
#include "drain/quantiles.hpp"

namespace drain::eval {

/// Reference rain-rate bin edges; the last edge may be +inf.
inline std::vector<double> default_coverage_edges()
{
    return {0.0, 0.1, 1.0, 10.0, std::numeric_limits<double>::infinity()};
}

struct CoverageRow {
    std::string label;
    std::size_t n = 0;
    double coverage50 = 0.0;  // percent, NaN when n = 0
    double coverage90 = 0.0;
};

/// One row per bin then "All".
struct CoverageTable {
    std::vector<CoverageRow> rows;
};

/// Band bounds per pixel (inclusive). A pixel counts when est and ref are both rainy.
struct BandPixels {
    std::span<const float> est;
    std::span<const float> ref;
    std::span<const float> lo50;
    std::span<const float> hi50;
    std::span<const float> lo90;
    std::span<const float> hi90;
};

CoverageTable coverage_table(const BandPixels& px, std::span<const double> edges = default_coverage_edges(),
                             double threshold = quantiles::kRainThreshold);

/// Monotonized quantiles against a reference; the median is the detection estimate.
CoverageTable coverage_table(const QuantileField& qf, const RainField& ref,
                             std::span<const double> edges = default_coverage_edges(),
                             double threshold = quantiles::kRainThreshold);

/// rain_interval,n,coverage_50,coverage_90
CsvTable coverage_csv(const CoverageTable& t);

}  // namespace drain::eval
