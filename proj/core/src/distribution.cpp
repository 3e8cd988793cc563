#include "drain/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drain/errors.hpp"

namespace drain::eval {

std::vector<double> default_intensity_edges()
{
    std::vector<double> e(41);
    for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = 0.05 * static_cast<double>(k);
    }
    return e;
}

IntensityHistogram intensity_histogram(std::span<const NamedValues> fields, std::span<const double> edges,
                                       double threshold)
{
    if (edges.size() < 2) {
        throw UsageError("histogram needs at least one bin");
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (!(edges[k] > edges[k - 1])) {
            throw UsageError("histogram edges must be strictly increasing");
        }
    }
    const std::size_t bins = edges.size() - 1;
    IntensityHistogram h;
    h.edges.assign(edges.begin(), edges.end());
    for (const auto& f : fields) {
        std::vector<std::uint64_t> counts(bins, 0);
        std::uint64_t rainy = 0;
        for (const float v : f.values) {
            if (!quantiles::is_rain(v, threshold)) {
                continue;
            }
            ++rainy;
            const double x = v;
            if (x < edges.front() || x > edges.back()) {
                continue;
            }
            auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
            k = std::min(k, bins) - 1;
            ++counts[k];
        }
        std::vector<double> density(bins, 0.0);
        for (std::size_t k = 0; k < bins; ++k) {
            density[k] = rainy ? static_cast<double>(counts[k]) /
                                     (static_cast<double>(rainy) * (edges[k + 1] - edges[k]))
                               : std::numeric_limits<double>::quiet_NaN();
        }
        h.names.push_back(f.name);
        h.counts.push_back(std::move(counts));
        h.density.push_back(std::move(density));
        h.rainy.push_back(rainy);
    }
    return h;
}

CsvTable histogram_csv(const IntensityHistogram& h)
{
    std::vector<std::string> header{"bin_lo", "bin_hi"};
    for (const auto& n : h.names) {
        header.push_back(n + "_count");
        header.push_back(n + "_density");
    }
    CsvTable csv(header);
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
        std::vector<std::string> row{format_number(h.edges[k]), format_number(h.edges[k + 1])};
        for (std::size_t f = 0; f < h.names.size(); ++f) {
            row.push_back(std::to_string(h.counts[f][k]));
            row.push_back(format_number(h.density[f][k]));
        }
        csv.row(std::move(row));
    }
    return csv;
}

}  // namespace drain::eval
