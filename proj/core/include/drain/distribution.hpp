#pragma once

// Intensity histograms of rainy pixels with shared binning across estimators.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drain/csv.hpp"
#include "drain/quantiles.hpp"

namespace drain::eval {

struct NamedValues {
    std::string name;
    std::span<const float> values;
};

struct IntensityHistogram {
    std::vector<double> edges;
    std::vector<std::string> names;
    std::vector<std::vector<std::uint64_t>> counts;  // [field][bin]
    std::vector<std::vector<double>> density;        // counts / (rainy pixels * width)
    std::vector<std::uint64_t> rainy;                // rainy pixels per field, in range or not
};

/// Light-rain default: 0 to 2 mm/hr in 0.05 mm/hr bins.
std::vector<double> default_intensity_edges();

/// Bins [e_k, e_{k+1}); the last bin also takes values equal to the top edge.
IntensityHistogram intensity_histogram(std::span<const NamedValues> fields,
                                       std::span<const double> edges = default_intensity_edges(),
                                       double threshold = quantiles::kRainThreshold);

/// bin_lo,bin_hi,<name>_count,<name>_density,...
CsvTable histogram_csv(const IntensityHistogram& h);

}  // namespace drain::eval
