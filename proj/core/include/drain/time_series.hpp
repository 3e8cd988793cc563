#pragma once

// Mean absolute error per calendar bucket (UTC).

#include <span>
#include <string>
#include <vector>

#include "drain/csv.hpp"
#include "drain/quantiles.hpp"

namespace drain::eval {

enum class TimeBucket { Month, Day };

struct OverpassPair {
    double time = 0.0;  // seconds since the Unix epoch
    std::span<const float> est;
    std::span<const float> ref;
};

struct MaePoint {
    std::string label;  // "2019-03" or "2019-03-14"
    double start = 0.0;
    double mae = 0.0;   // NaN for an empty bucket
    std::size_t n = 0;
};

/// Every bucket from the earliest to the latest overpass, contiguous. MAE is
/// taken over pixels where both sides are rainy.
std::vector<MaePoint> mae_by_time(std::span<const OverpassPair> pairs, TimeBucket bucket = TimeBucket::Month,
                                  double threshold = quantiles::kRainThreshold);

struct NamedSeries {
    std::string name;
    std::vector<MaePoint> points;
};

/// bucket,start_time,<name>_mae,<name>_n,... Series are joined on the bucket label.
CsvTable mae_csv(std::span<const NamedSeries> series);

}  // namespace drain::eval
