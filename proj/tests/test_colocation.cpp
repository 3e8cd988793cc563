#include <doctest.h>

#include <cmath>
#include <random>

#include "drain/colocation.hpp"
#include "drain/errors.hpp"
#include "drain/grid.hpp"
#include "drain/mosaic.hpp"
#include "support/fixtures.hpp"

using namespace drain;
using namespace drain::colocation;
using drain::test::make_geo;

namespace {

Geolocation single_pixel(double lat, double lon)
{
    return Geolocation(1, 1, {static_cast<float>(lat)}, {static_cast<float>(lon)}, {0.0});
}

PointSample offset_km(LatLon c, double north_km, double east_km, double value)
{
    const double lat = c.lat + north_km / km_per_degree();
    const double lon = c.lon + east_km / (km_per_degree() * std::cos(c.lat * 3.14159265358979323846 / 180.0));
    return {lat, lon, value, 0.0};
}

MosaicFrame frame_of(std::size_t rows, std::size_t cols, float acc, std::uint8_t quality, double time = 0.0)
{
    MosaicFrame f;
    f.rows = rows;
    f.cols = cols;
    f.origin_lat = 45.0;
    f.origin_lon = 2.0;
    f.cell_deg = 0.01;
    f.time = time;
    f.accumulation.assign(rows * cols, acc);
    f.quality.assign(rows * cols, quality);
    return f;
}

}  // namespace

TEST_SUITE("colocation")
{
    TEST_CASE("radius mean of nearby samples")
    {
        const LatLon c{47.0, 5.0};
        const std::vector<PointSample> s{offset_km(c, 1, 0, 1.0), offset_km(c, 0, -2, 2.0), offset_km(c, -3, 3, 3.0),
                                         offset_km(c, 20, 0, 50.0)};
        const auto out = colocate_radius_mean(s, single_pixel(c.lat, c.lon));
        CHECK(out.values()[0] == doctest::Approx(2.0));
    }

    TEST_CASE("empty neighbourhood is NaN")
    {
        const LatLon c{0.0, 0.0};
        const std::vector<PointSample> s{offset_km(c, 6, 0, 1.0)};
        CHECK(std::isnan(colocate_radius_mean(s, single_pixel(0, 0)).values()[0]));
        CHECK(std::isnan(colocate_radius_mean({}, single_pixel(0, 0)).values()[0]));
    }

    TEST_CASE("NaN samples never contribute")
    {
        const LatLon c{10.0, 10.0};
        const std::vector<PointSample> s{offset_km(c, 1, 0, NAN), offset_km(c, 0, 1, 4.0)};
        CHECK(colocate_radius_mean(s, single_pixel(10, 10)).values()[0] == doctest::Approx(4.0));
    }

    TEST_CASE("indexed query equals the all-pairs scan")
    {
        std::mt19937_64 rng(2024);
        for (int rep = 0; rep < 40; ++rep) {
            const auto k = test::random_colocation_case(rng);
            const auto sets = colocate_contributors(k.samples, k.targets, k.radius_km);
            const auto means = colocate_radius_mean(k.samples, k.targets, k.radius_km);
            for (std::size_t i = 0; i < k.targets.size(); ++i) {
                const auto want = test::brute_contributors(k.samples, k.targets.at(i), k.radius_km);
                REQUIRE(sets[i] == want);
                if (want.empty()) {
                    CHECK(std::isnan(means.values()[i]));
                    continue;
                }
                double sum = 0.0;
                for (auto j : want) {
                    sum += k.samples[j].value;
                }
                CHECK(std::abs(static_cast<double>(means.values()[i]) - static_cast<double>(static_cast<float>(sum / want.size()))) <= 1e-9);
            }
        }
    }

    TEST_CASE("result does not depend on sample order")
    {
        std::mt19937_64 rng(8);
        const auto k = test::random_colocation_case(rng);
        auto shuffled = k.samples;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto a = colocate_radius_mean(k.samples, k.targets, k.radius_km);
        const auto b = colocate_radius_mean(shuffled, k.targets, k.radius_km);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const float x = a.values()[i], y = b.values()[i];
            CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
        }
    }

    TEST_CASE("non-positive radius is a usage error")
    {
        CHECK_THROWS_AS(colocate_radius_mean({}, single_pixel(0, 0), 0.0), UsageError);
    }

    TEST_CASE("overpass coverage equals the per-pixel predicate")
    {
        const auto geo = make_geo(30, 40, 38.0, -9.0, 0.5);
        CHECK(overpass_coverage(geo, LatLonBox{}) == geo.size());
        CHECK(overpass_coverage(geo, LatLonBox{-10, -5, 100, 110}) == 0);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> lat(30, 60), lon(-10, 15);
        for (int i = 0; i < 200; ++i) {
            double a = lat(rng), b = lat(rng), c = lon(rng), d = lon(rng);
            const LatLonBox box{std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d)};
            std::size_t want = 0;
            for (std::size_t p = 0; p < geo.size(); ++p) {
                const double pl = geo.lat()[p], po = geo.lon()[p];
                want += pl >= box.lat_min && pl <= box.lat_max && po >= box.lon_min && po <= box.lon_max;
            }
            CHECK(overpass_coverage(geo, box) == want);
        }
        CHECK(overpass_mid_time(geo) == doctest::Approx((geo.scan_time().front() + geo.scan_time().back()) / 2));
    }
}

TEST_SUITE("mosaic")
{
    TEST_CASE("accumulation to rate and the quality cut")
    {
        CHECK(mosaic_to_rate(frame_of(1, 1, 1.0f, 100)).rate[0] == 12.0f);
        CHECK(std::isnan(mosaic_to_rate(frame_of(1, 1, 0.5f, 79)).rate[0]));
        CHECK(mosaic_to_rate(frame_of(1, 1, 0.5f, 80)).rate[0] == 6.0f);
        CHECK(mosaic_to_rate(frame_of(1, 1, 0.0f, 100)).rate[0] == 0.0f);
        CHECK(std::isnan(mosaic_to_rate(frame_of(1, 1, 1.0f, 95), 96).rate[0]));
    }

    TEST_CASE("invalid frames are rejected")
    {
        auto f = frame_of(2, 2, 1.0f, 100);
        f.quality[1] = 101;
        CHECK_THROWS_AS(mosaic_to_rate(f), DataError);
        auto g = frame_of(2, 2, -1.0f, 100);
        CHECK_THROWS_AS(mosaic_to_rate(g), DataError);
        auto h = frame_of(2, 2, 1.0f, 100);
        h.accumulation.pop_back();
        CHECK_THROWS_AS(mosaic_to_rate(h), DataError);
    }

    TEST_CASE("samples sit at cell centres and honour the box")
    {
        auto f = frame_of(2, 3, 0.25f, 100);
        f.quality[0] = 10;
        const auto s = mosaic_samples(mosaic_to_rate(f));
        REQUIRE(s.size() == 5);
        CHECK(s[0].lat == doctest::Approx(45.005));
        CHECK(s[0].lon == doctest::Approx(2.015));
        CHECK(s[0].value == doctest::Approx(3.0));
        const auto boxed = mosaic_samples(mosaic_to_rate(f), LatLonBox{45.01, 46, 0, 10});
        CHECK(boxed.size() == 3);
    }

    TEST_CASE("nearest frame in time")
    {
        std::vector<MosaicFrame> frames{frame_of(1, 1, 0, 100, 0.0), frame_of(1, 1, 0, 100, 300.0),
                                        frame_of(1, 1, 0, 100, 600.0)};
        CHECK(nearest_time_frame(frames, 300.0).time == 300.0);
        CHECK(nearest_time_frame(frames, 150.0).time == 0.0);
        CHECK(nearest_time_frame(frames, 450.0).time == 300.0);
        CHECK(nearest_time_frame(frames, 1e6).time == 600.0);
        CHECK_THROWS_AS(nearest_time_frame(std::span<const MosaicFrame>{}, 0.0), DataError);
        std::swap(frames[0], frames[2]);
        CHECK_THROWS_AS(nearest_time_frame(frames, 0.0), UsageError);
    }

    TEST_CASE("nearest time matches a linear-scan argmin")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0, 1e4);
        for (int rep = 0; rep < 300; ++rep) {
            std::vector<double> times(1 + rep % 9);
            for (auto& t : times) {
                t = std::round(u(rng) / 50) * 50;
            }
            std::sort(times.begin(), times.end());
            const double t = std::round(u(rng) / 25) * 25;
            std::size_t want = 0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (std::abs(times[i] - t) < std::abs(times[want] - t)) {
                    want = i;
                }
            }
            CHECK(nearest_time_index(times, t) == want);
        }
    }

    TEST_CASE("MOS1 round trip")
    {
        test::ScratchDir dir("mos");
        auto f = frame_of(3, 4, 0.3f, 90, 1234.5);
        f.accumulation[7] = 2.5f;
        f.quality[2] = 0;
        write_mosaic(dir / "f.mos", f);
        const auto b = read_mosaic(dir / "f.mos");
        CHECK(b.rows == 3);
        CHECK(b.cols == 4);
        CHECK(b.time == 1234.5);
        CHECK(b.accumulation == f.accumulation);
        CHECK(b.quality == f.quality);
    }
}

TEST_SUITE("grid")
{
    TEST_CASE("grid_average basics")
    {
        const auto spec = GridSpec::global(1.0);
        const std::vector<float> lat{10.2f}, lon{20.7f}, v{2.0f};
        const auto g = grid_average(lat, lon, v, spec, 1e-3);
        const auto cell = spec.cell_of({10.2, 20.7});
        REQUIRE(cell >= 0);
        CHECK(g.mean[cell] == doctest::Approx(2.0));
        CHECK(g.count[cell] == 1);

        const std::vector<float> lat2{10.2f, 10.4f}, lon2{20.7f, 20.1f}, v2{0.0005f, 3.0f};
        const auto g2 = grid_average(lat2, lon2, v2, spec, 1e-3);
        CHECK(g2.mean[cell] == doctest::Approx(3.0));
        CHECK(g2.count[cell] == 1);
    }

    TEST_CASE("uniform field gives the uniform value in every covered cell")
    {
        const auto geo = make_geo(50, 50, 40.0, 0.0, 0.1);
        const std::vector<float> v(geo.size(), 1.75f);
        const auto spec = GridSpec::covering(kMosaicDomain, 0.2);
        const auto g = grid_average(geo.lat(), geo.lon(), v, spec, 1e-3);
        std::size_t covered = 0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            if (g.count[i] > 0) {
                ++covered;
                CHECK(g.mean[i] == doctest::Approx(1.75));
            } else {
                CHECK(std::isnan(g.mean[i]));
            }
        }
        CHECK(covered > 0);
    }

    TEST_CASE("grid geometry")
    {
        const auto g = GridSpec::global(0.2);
        CHECK(g.rows == 900);
        CHECK(g.cols == 1800);
        CHECK(g.cell_of({-90.0, -180.0}) == 0);
        CHECK(g.cell_of({90.0, 0.0}) == -1);
        const auto box = GridSpec::covering(kMosaicDomain, 1.0);
        CHECK(box.rows == 15);
        CHECK(box.cols == 20);
        CHECK_THROWS_AS(GridSpec::global(0.0), UsageError);
        const auto csv = grid_csv(grid_average({}, {}, {}, box, 0.0), true);
        CHECK(csv.rows().empty());
        CHECK(grid_csv(grid_average({}, {}, {}, box, 0.0)).rows().size() == 300);
    }
}
