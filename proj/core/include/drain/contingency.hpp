#pragma once

// Rain/no-rain contingency tables and detection scores. Reference is on the
// rows, the estimator on the columns.

#include <span>
#include <string>
#include <vector>

#include "drain/csv.hpp"
#include "drain/quantiles.hpp"
#include "drain/swath.hpp"

namespace drain::eval {

/// Cells hold pixel counts, or percentages after to_percent(). Doubles so
/// that percentage tables can be fed to scores() directly.
struct ContingencyTable {
    double tp = 0.0;  // ref rain, est rain
    double fn = 0.0;  // ref rain, est dry
    double fp = 0.0;  // ref dry, est rain
    double tn = 0.0;  // ref dry, est dry
    double threshold = quantiles::kRainThreshold;

    double total() const noexcept { return tp + fn + fp + tn; }
    ContingencyTable to_percent() const noexcept;
    ContingencyTable& operator+=(const ContingencyTable& o) noexcept;
};

/// Counts over pixels where both sides are finite; an empty input gives an all-zero table.
ContingencyTable count_contingency(std::span<const float> est, std::span<const float> ref,
                                   double threshold = quantiles::kRainThreshold);

/// As count_contingency, but throws DataError when no pixel is co-located.
ContingencyTable contingency(std::span<const float> est, std::span<const float> ref,
                             double threshold = quantiles::kRainThreshold);
ContingencyTable contingency(const RainField& est, const RainField& ref,
                             double threshold = quantiles::kRainThreshold);

/// Each score is NaN when its denominator is zero.
struct ScoreSet {
    double pod = 0.0;
    double far = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

ScoreSet scores(const ContingencyTable& t) noexcept;

struct NamedTable {
    std::string surface;    // LAND / OCEAN / TOTAL, or a domain name
    std::string estimator;
    ContingencyTable table;
};

/// Percentage tables: surface,estimator,reference,rain_pct,no_rain_pct (two rows per table).
CsvTable contingency_csv(std::span<const NamedTable> tables);
/// surface,estimator,pod,far,precision,f1,n
CsvTable scores_csv(std::span<const NamedTable> tables);
/// One reference-vs-estimator block with POD, FAR, precision and F1 alongside.
CsvTable detection_table_csv(const NamedTable& t);

}  // namespace drain::eval
