#include "drain/contingency.hpp"

#include <cmath>
#include <limits>

#include "drain/errors.hpp"

namespace drain::eval {

namespace {

double ratio(double num, double den) noexcept
{
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

void check_aligned(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw UsageError("estimate and reference have different pixel counts");
    }
}

}  // namespace

ContingencyTable ContingencyTable::to_percent() const noexcept
{
    const double n = total();
    ContingencyTable out = *this;
    if (n > 0.0) {
        out.tp = 100.0 * tp / n;
        out.fn = 100.0 * fn / n;
        out.fp = 100.0 * fp / n;
        out.tn = 100.0 * tn / n;
    }
    return out;
}

ContingencyTable& ContingencyTable::operator+=(const ContingencyTable& o) noexcept
{
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    tn += o.tn;
    return *this;
}

ContingencyTable count_contingency(std::span<const float> est, std::span<const float> ref, double threshold)
{
    check_aligned(est.size(), ref.size());
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (std::isnan(est[i]) || std::isnan(ref[i])) {
            continue;
        }
        const bool r = quantiles::is_rain(ref[i], threshold);
        const bool e = quantiles::is_rain(est[i], threshold);
        if (r) {
            (e ? tp : fn) += 1;
        } else {
            (e ? fp : tn) += 1;
        }
    }
    ContingencyTable t;
    t.tp = static_cast<double>(tp);
    t.fn = static_cast<double>(fn);
    t.fp = static_cast<double>(fp);
    t.tn = static_cast<double>(tn);
    t.threshold = threshold;
    return t;
}

ContingencyTable contingency(std::span<const float> est, std::span<const float> ref, double threshold)
{
    auto t = count_contingency(est, ref, threshold);
    if (t.total() == 0.0) {
        throw DataError("no co-located pixels: every pair has a missing value");
    }
    return t;
}

ContingencyTable contingency(const RainField& est, const RainField& ref, double threshold)
{
    return contingency(est.values(), ref.values(), threshold);
}

ScoreSet scores(const ContingencyTable& t) noexcept
{
    ScoreSet s;
    s.pod = ratio(t.tp, t.tp + t.fn);
    s.far = ratio(t.fp, t.fp + t.tp);
    s.precision = ratio(t.tp, t.tp + t.fp);
    s.f1 = std::isnan(s.pod) || std::isnan(s.precision) ? std::numeric_limits<double>::quiet_NaN()
                                                         : ratio(2.0 * s.precision * s.pod, s.precision + s.pod);
    return s;
}

CsvTable contingency_csv(std::span<const NamedTable> tables)
{
    CsvTable csv({"surface", "estimator", "reference", "rain_pct", "no_rain_pct"});
    for (const auto& t : tables) {
        const auto p = t.table.to_percent();
        csv.row({t.surface, t.estimator, "rain", format_number(p.tp), format_number(p.fn)});
        csv.row({t.surface, t.estimator, "no_rain", format_number(p.fp), format_number(p.tn)});
    }
    return csv;
}

CsvTable scores_csv(std::span<const NamedTable> tables)
{
    CsvTable csv({"surface", "estimator", "pod", "far", "precision", "f1", "n"});
    for (const auto& t : tables) {
        const auto s = scores(t.table);
        csv.row({t.surface, t.estimator, format_number(s.pod), format_number(s.far), format_number(s.precision),
                 format_number(s.f1), format_number(t.table.total())});
    }
    return csv;
}

CsvTable detection_table_csv(const NamedTable& t)
{
    const auto p = t.table.to_percent();
    const auto s = scores(t.table);
    CsvTable csv({"ref_vs_" + t.estimator, "positive_pct", "negative_pct", "score", "value"});
    csv.row({"positive", format_number(p.tp), format_number(p.fn), "pod", format_number(s.pod)});
    csv.row({"negative", format_number(p.fp), format_number(p.tn), "far", format_number(s.far)});
    csv.row({"precision", format_number(s.precision), "", "f1", format_number(s.f1)});
    csv.row({"total_pixels", format_number(t.table.total()), "", "threshold", format_number(t.table.threshold)});
    return csv;
}

}  // namespace drain::eval
