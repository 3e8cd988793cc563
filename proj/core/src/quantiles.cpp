#include "drain/quantiles.hpp"

#include <algorithm>
#include <cmath>

#include "drain/errors.hpp"

namespace drain::quantiles {

namespace {

bool nan_last_less(float a, float b) noexcept
{
    if (std::isnan(a)) {
        return false;
    }
    return std::isnan(b) || a < b;
}

std::vector<double> levels_of(const QuantileField& qf)
{
    std::vector<double> out(qf.n_levels());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = qf.level(j);
    }
    return out;
}

void check_edges(std::span<const double> edges)
{
    if (edges.size() < 2) {
        throw UsageError("need at least two bin edges");
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (!(edges[k] > edges[k - 1])) {
            throw UsageError("bin edges must be strictly increasing");
        }
    }
}

}  // namespace

QuantileField monotonize(const QuantileField& qf)
{
    const std::size_t n = qf.n_pixels(), L = qf.n_levels();
    std::vector<float> out(qf.values().begin(), qf.values().end());
    std::vector<float> stack(L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            stack[j] = out[j * n + i];
        }
        std::sort(stack.begin(), stack.end(), nan_last_less);
        for (std::size_t j = 0; j < L; ++j) {
            out[j * n + i] = stack[j] < 0.0f ? 0.0f : stack[j];
        }
    }
    return QuantileField(qf.geo(), std::move(out), L);
}

std::size_t plane_index(const QuantileField& qf, double level)
{
    const double scaled = level * static_cast<double>(qf.n_levels() + 1);
    const double rounded = std::round(scaled);
    if (!(std::abs(scaled - rounded) < 1e-9) || rounded < 1.0 ||
        rounded > static_cast<double>(qf.n_levels())) {
        throw UsageError("quantile level " + std::to_string(level) + " is not one of the retrieved levels");
    }
    return static_cast<std::size_t>(rounded) - 1;
}

RainField point_estimate(const QuantileField& qf, double level)
{
    const auto plane = qf.plane(plane_index(qf, level));
    return RainField(qf.geo(), std::vector<float>(plane.begin(), plane.end()), Provenance::Retrieval);
}

ConfidenceBand confidence_band(const QuantileField& qf, double level)
{
    double lo = 0.0, hi = 0.0;
    if (level == 0.5) {
        lo = 0.25;
        hi = 0.75;
    } else if (level == 0.9) {
        lo = 0.05;
        hi = 0.95;
    } else {
        throw UsageError("confidence band level must be 0.5 or 0.9");
    }
    return {level, point_estimate(qf, lo), point_estimate(qf, hi)};
}

double cdf_at(std::span<const float> knots, std::span<const double> levels, double x)
{
    const std::size_t n = knots.size();
    const auto it = std::lower_bound(knots.begin(), knots.end(), x,
                                     [](float k, double v) { return static_cast<double>(k) < v; });
    const auto j = static_cast<std::size_t>(it - knots.begin());
    if (j == 0) {
        return levels[0];
    }
    if (j == n) {
        return levels[n - 1];
    }
    const double x1 = knots[j - 1], x2 = knots[j];
    if (x2 == x) {
        return levels[j];
    }
    return levels[j - 1] + (levels[j] - levels[j - 1]) * (x - x1) / (x2 - x1);
}

std::vector<double> bin_mass(std::span<const float> knots, std::span<const double> levels,
                             std::span<const double> edges)
{
    check_edges(edges);
    if (knots.size() != levels.size() || knots.empty()) {
        throw UsageError("knot and level counts differ");
    }
    std::vector<double> out(edges.size() - 1);
    double prev = cdf_at(knots, levels, edges[0]);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double next = cdf_at(knots, levels, edges[k + 1]);
        out[k] = next - prev;
        prev = next;
    }
    return out;
}

PdfField pdf_from_cdf(const QuantileField& qf, std::span<const double> edges)
{
    check_edges(edges);
    const auto levels = levels_of(qf);
    const std::size_t n = qf.n_pixels(), L = qf.n_levels(), bins = edges.size() - 1;
    PdfField out;
    out.edges.assign(edges.begin(), edges.end());
    out.n_pixels = n;
    out.density.assign(bins * n, 0.0);
    std::vector<float> knots(L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            knots[j] = qf.value(j, i);
        }
        if (!std::is_sorted(knots.begin(), knots.end())) {
            throw UsageError("pdf_from_cdf needs a monotonized quantile field");
        }
        const auto mass = bin_mass(knots, levels, edges);
        for (std::size_t k = 0; k < bins; ++k) {
            out.density[k * n + i] = mass[k] / (edges[k + 1] - edges[k]);
        }
    }
    return out;
}

std::vector<std::uint8_t> rain_mask(const RainField& field, double threshold)
{
    std::vector<std::uint8_t> out(field.size());
    const auto v = field.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = is_rain(v[i], threshold) ? 1 : 0;
    }
    return out;
}

}  // namespace drain::quantiles
