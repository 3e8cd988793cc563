#include "drain/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "drain/errors.hpp"

namespace drain::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_aligned(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw UsageError("estimate and reference have different pixel counts");
    }
}

std::ptrdiff_t bin_of(std::span<const double> edges, double v) noexcept
{
    if (!(v >= edges.front()) || !(v < edges.back())) {
        return -1;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return (it - edges.begin()) - 1;
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

BiasRmse conditional_bias_rmse(std::span<const float> est, std::span<const float> ref, double threshold)
{
    check_aligned(est.size(), ref.size());
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (quantiles::is_rain(est[i], threshold) && quantiles::is_rain(ref[i], threshold)) {
            const double d = static_cast<double>(ref[i]) - static_cast<double>(est[i]);
            sum += d;
            sq += d * d;
            ++n;
        }
    }
    if (n == 0) {
        return {kNaN, kNaN, 0};
    }
    return {sum / static_cast<double>(n), std::sqrt(sq / static_cast<double>(n)), n};
}

ErrorStats error_conditional_stats(std::span<const float> est, std::span<const float> ref, double threshold)
{
    check_aligned(est.size(), ref.size());
    double fa_sum = 0.0, fa_sq = 0.0, bd_sum = 0.0;
    std::size_t fa_n = 0, bd_n = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (std::isnan(est[i]) || std::isnan(ref[i])) {
            continue;
        }
        const bool e = quantiles::is_rain(est[i], threshold);
        const bool r = quantiles::is_rain(ref[i], threshold);
        if (e && !r) {
            fa_sum += est[i];
            fa_sq += static_cast<double>(est[i]) * est[i];
            ++fa_n;
        } else if (r && !e) {
            bd_sum += ref[i];
            ++bd_n;
        }
    }
    ErrorStats s;
    s.fa_n = fa_n;
    s.bd_n = bd_n;
    s.fa_mean = fa_n ? fa_sum / static_cast<double>(fa_n) : kNaN;
    s.fa_rmse = fa_n ? std::sqrt(fa_sq / static_cast<double>(fa_n)) : kNaN;
    s.bd_mean = bd_n ? bd_sum / static_cast<double>(bd_n) : kNaN;
    return s;
}

LinearFit fit_line(std::span<const float> x, std::span<const float> y)
{
    check_aligned(x.size(), y.size());
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            sx += x[i];
            sy += y[i];
            ++n;
        }
    }
    if (n < 2) {
        throw DataError("regression needs at least two finite pairs");
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            const double dx = x[i] - mx, dy = y[i] - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    }
    LinearFit f;
    f.n = n;
    if (sxx == 0.0) {
        f.slope = f.intercept = f.r2 = kNaN;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy == 0.0) {
        f.r2 = 0.0;
        return f;
    }
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            const double r = y[i] - (f.slope * x[i] + f.intercept);
            ss_res += r * r;
        }
    }
    f.r2 = 1.0 - ss_res / syy;
    return f;
}

std::vector<double> linear_edges(double lo, double hi, std::size_t bins)
{
    if (bins == 0 || !(hi > lo)) {
        throw UsageError("linear_edges needs bins >= 1 and hi > lo");
    }
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) {
        e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    }
    e.back() = hi;
    return e;
}

std::vector<double> log_edges(double lo, double hi, std::size_t bins)
{
    if (bins == 0 || !(lo > 0.0) || !(hi > lo)) {
        throw UsageError("log_edges needs bins >= 1 and 0 < lo < hi");
    }
    std::vector<double> e(bins + 1);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k <= bins; ++k) {
        e[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(bins));
    }
    e.front() = lo;
    e.back() = hi;
    return e;
}

DensityScatter density_scatter(std::span<const float> est, std::span<const float> ref,
                               std::span<const double> x_edges, std::span<const double> y_edges)
{
    check_edges(x_edges);
    check_edges(y_edges);
    DensityScatter s;
    s.x_edges.assign(x_edges.begin(), x_edges.end());
    s.y_edges.assign(y_edges.begin(), y_edges.end());
    const std::size_t nx = x_edges.size() - 1, ny = y_edges.size() - 1;
    s.counts.assign(nx * ny, 0);
    s.fit = fit_line(ref, est);
    for (std::size_t i = 0; i < est.size(); ++i) {
        const auto bx = bin_of(x_edges, ref[i]);
        const auto by = bin_of(y_edges, est[i]);
        if (bx >= 0 && by >= 0) {
            ++s.counts[static_cast<std::size_t>(by) * nx + static_cast<std::size_t>(bx)];
        }
    }
    return s;
}

CsvTable bias_rmse_csv(std::span<const NamedBiasRmse> rows)
{
    std::vector<std::string> surfaces, estimators;
    std::map<std::pair<std::string, std::string>, BiasRmse> cells;
    for (const auto& r : rows) {
        if (std::find(surfaces.begin(), surfaces.end(), r.surface) == surfaces.end()) {
            surfaces.push_back(r.surface);
        }
        if (std::find(estimators.begin(), estimators.end(), r.estimator) == estimators.end()) {
            estimators.push_back(r.estimator);
        }
        cells[{r.surface, r.estimator}] = r.value;
    }
    std::vector<std::string> header{"surface"};
    for (const auto& e : estimators) {
        header.push_back(e + "_bias");
        header.push_back(e + "_rmse");
        header.push_back(e + "_n");
    }
    CsvTable csv(header);
    for (const auto& s : surfaces) {
        std::vector<std::string> row{s};
        for (const auto& e : estimators) {
            const auto it = cells.find({s, e});
            const BiasRmse v = it == cells.end() ? BiasRmse{kNaN, kNaN, 0} : it->second;
            row.push_back(format_number(v.bias));
            row.push_back(format_number(v.rmse));
            row.push_back(std::to_string(v.n));
        }
        csv.row(std::move(row));
    }
    return csv;
}

CsvTable error_stats_csv(std::span<const NamedErrorStats> rows)
{
    CsvTable csv({"surface", "estimator", "fa_mean", "fa_rmse", "fa_n", "bd_mean", "bd_n"});
    for (const auto& r : rows) {
        csv.row({r.surface, r.estimator, format_number(r.value.fa_mean), format_number(r.value.fa_rmse),
                 std::to_string(r.value.fa_n), format_number(r.value.bd_mean), std::to_string(r.value.bd_n)});
    }
    return csv;
}

CsvTable scatter_csv(const DensityScatter& s)
{
    CsvTable csv({"ref_lo", "ref_hi", "est_lo", "est_hi", "count"});
    const std::size_t nx = s.x_edges.size() - 1, ny = s.y_edges.size() - 1;
    for (std::size_t by = 0; by < ny; ++by) {
        for (std::size_t bx = 0; bx < nx; ++bx) {
            csv.row({format_number(s.x_edges[bx]), format_number(s.x_edges[bx + 1]), format_number(s.y_edges[by]),
                     format_number(s.y_edges[by + 1]), std::to_string(s.counts[by * nx + bx])});
        }
    }
    return csv;
}

CsvTable fit_csv(std::span<const std::pair<std::string, LinearFit>> fits)
{
    CsvTable csv({"estimator", "slope", "intercept", "r2", "n"});
    for (const auto& [name, f] : fits) {
        csv.row({name, format_number(f.slope), format_number(f.intercept), format_number(f.r2),
                 std::to_string(f.n)});
    }
    return csv;
}

}  // namespace drain::eval
