#pragma once

// Continuous error statistics: conditional bias/RMSE on true positives,
// false-alarm and missed-detection magnitudes, and 2-D density scatters
// with an ordinary least-squares line.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drain/csv.hpp"
#include "drain/quantiles.hpp"

namespace drain::eval {

struct BiasRmse {
    double bias = 0.0;  // mean(ref - est)
    double rmse = 0.0;
    std::size_t n = 0;
};

/// Over true positives only; NaN pair with n = 0 when there are none.
BiasRmse conditional_bias_rmse(std::span<const float> est, std::span<const float> ref,
                               double threshold = quantiles::kRainThreshold);

struct ErrorStats {
    double fa_mean = 0.0;  // estimator values on false alarms
    double fa_rmse = 0.0;  // sqrt(mean(est^2)) on false alarms
    std::size_t fa_n = 0;
    double bd_mean = 0.0;  // reference values on missed detections
    std::size_t bd_n = 0;
};

ErrorStats error_conditional_stats(std::span<const float> est, std::span<const float> ref,
                                   double threshold = quantiles::kRainThreshold);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// OLS of y on x over pairs where both are finite. Needs n >= 2.
/// Var(x) = 0 gives an all-NaN fit; Var(y) = 0 gives slope 0 and R^2 = 0.
LinearFit fit_line(std::span<const float> x, std::span<const float> y);

std::vector<double> linear_edges(double lo, double hi, std::size_t bins);
std::vector<double> log_edges(double lo, double hi, std::size_t bins);

struct DensityScatter {
    std::vector<double> x_edges;  // reference axis
    std::vector<double> y_edges;  // estimator axis
    std::vector<std::uint64_t> counts;  // [y_bin][x_bin]
    LinearFit fit;                      // est = slope * ref + intercept, over all finite pairs
};

/// Pairs outside the edges are left out of the histogram but kept in the fit.
DensityScatter density_scatter(std::span<const float> est, std::span<const float> ref,
                               std::span<const double> x_edges, std::span<const double> y_edges);

/// bias/rmse table: surface,<estimator>_bias,<estimator>_rmse,<estimator>_n,...
struct NamedBiasRmse {
    std::string surface;
    std::string estimator;
    BiasRmse value;
};
CsvTable bias_rmse_csv(std::span<const NamedBiasRmse> rows);

struct NamedErrorStats {
    std::string surface;
    std::string estimator;
    ErrorStats value;
};
CsvTable error_stats_csv(std::span<const NamedErrorStats> rows);

/// ref_lo,ref_hi,est_lo,est_hi,count
CsvTable scatter_csv(const DensityScatter& s);
/// estimator,slope,intercept,r2,n
CsvTable fit_csv(std::span<const std::pair<std::string, LinearFit>> fits);

}  // namespace drain::eval
