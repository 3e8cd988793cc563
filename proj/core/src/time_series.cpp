#include "drain/time_series.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "drain/errors.hpp"

namespace drain::eval {

namespace {

using namespace std::chrono;

sys_days bucket_start(double t, TimeBucket bucket)
{
    const auto day = floor<days>(sys_seconds(seconds(static_cast<long long>(std::floor(t)))));
    if (bucket == TimeBucket::Day) {
        return day;
    }
    const year_month_day ymd(day);
    return sys_days(ymd.year() / ymd.month() / 1);
}

sys_days next_bucket(sys_days d, TimeBucket bucket)
{
    if (bucket == TimeBucket::Day) {
        return d + days(1);
    }
    const year_month_day ymd(d);
    return sys_days((ymd.year() / ymd.month() + months(1)) / 1);
}

std::string label_of(sys_days d, TimeBucket bucket)
{
    const year_month_day ymd(d);
    char buf[32];
    if (bucket == TimeBucket::Day) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
    }
    return buf;
}

}  // namespace

std::vector<MaePoint> mae_by_time(std::span<const OverpassPair> pairs, TimeBucket bucket, double threshold)
{
    std::vector<MaePoint> out;
    if (pairs.empty()) {
        return out;
    }
    std::map<sys_days, std::pair<double, std::size_t>> acc;
    for (const auto& p : pairs) {
        if (p.est.size() != p.ref.size()) {
            throw UsageError("overpass estimate and reference have different pixel counts");
        }
        if (!std::isfinite(p.time)) {
            throw DataError("overpass without a finite timestamp");
        }
        auto& [sum, n] = acc[bucket_start(p.time, bucket)];
        for (std::size_t i = 0; i < p.est.size(); ++i) {
            if (quantiles::is_rain(p.est[i], threshold) && quantiles::is_rain(p.ref[i], threshold)) {
                sum += std::abs(static_cast<double>(p.est[i]) - static_cast<double>(p.ref[i]));
                ++n;
            }
        }
    }
    const auto last = acc.rbegin()->first;
    for (auto d = acc.begin()->first; d <= last; d = next_bucket(d, bucket)) {
        MaePoint pt;
        pt.label = label_of(d, bucket);
        pt.start = static_cast<double>(duration_cast<seconds>(d.time_since_epoch()).count());
        const auto it = acc.find(d);
        pt.n = it == acc.end() ? 0 : it->second.second;
        pt.mae = pt.n ? it->second.first / static_cast<double>(pt.n) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(pt));
    }
    return out;
}

CsvTable mae_csv(std::span<const NamedSeries> series)
{
    std::map<std::string, double> starts;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            starts.emplace(p.label, p.start);
        }
    }
    std::vector<std::string> header{"bucket", "start_time"};
    for (const auto& s : series) {
        header.push_back(s.name + "_mae");
        header.push_back(s.name + "_n");
    }
    CsvTable csv(header);
    for (const auto& [label, start] : starts) {
        std::vector<std::string> row{label, format_number(start)};
        for (const auto& s : series) {
            const MaePoint* hit = nullptr;
            for (const auto& p : s.points) {
                if (p.label == label) {
                    hit = &p;
                    break;
                }
            }
            row.push_back(format_number(hit ? hit->mae : std::numeric_limits<double>::quiet_NaN()));
            row.push_back(std::to_string(hit ? hit->n : 0));
        }
        csv.row(std::move(row));
    }
    return csv;
}

}  // namespace drain::eval
