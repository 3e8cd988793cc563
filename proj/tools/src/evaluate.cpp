#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "common.hpp"
#include "drain/cli/commands.hpp"
#include "drain/contingency.hpp"
#include "drain/continuous.hpp"
#include "drain/coverage.hpp"
#include "drain/distribution.hpp"
#include "drain/errors.hpp"
#include "drain/maps.hpp"
#include "drain/matched.hpp"
#include "drain/mosaic.hpp"
#include "drain/swath_io.hpp"
#include "drain/time_series.hpp"

namespace drain::cli {

using namespace detail;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SceneData {
    const SceneEntry* entry = nullptr;
    RainField ref;
    QuantileField qf;
    RainField drain;
    std::optional<RainField> external;
};

std::vector<SceneData> load_scenes(const Manifest& m, const std::string& split, const fs::path& retrieval)
{
    std::vector<SceneData> out;
    for (const auto* s : m.in_split(split)) {
        const auto qpath = retrieval / (s->id + ".quantiles.swt");
        if (!fs::exists(qpath)) {
            throw DataError("no retrieval for scene " + s->id + " in " + retrieval.string() + "; run retrieve first");
        }
        SceneData d;
        d.entry = s;
        d.qf = read_quantile_field(qpath);
        const auto ns = d.qf.geo().n_scan(), np = d.qf.geo().n_pix();
        d.ref = crop_rain(read_rain_field(s->ref, Provenance::Reference), ns, np);
        if (!d.ref.geo().same_grid(d.qf.geo())) {
            throw DataError("scene " + s->id + ": retrieval and reference grids differ");
        }
        d.drain = quantiles::point_estimate(d.qf, 0.5);
        if (!s->external.empty()) {
            d.external = crop_rain(read_rain_field(s->external, Provenance::ExternalEstimator), ns, np);
        }
        out.push_back(std::move(d));
    }
    if (out.empty()) {
        throw DataError("split '" + split + "' is empty");
    }
    return out;
}

struct Estimator {
    std::string name;
    eval::MatchedPixels px;
};

const std::array<eval::Stratum, 3> kStrata{eval::Stratum::Land, eval::Stratum::Ocean, eval::Stratum::Total};

/// True-positive pairs, for scatter plots.
std::pair<std::vector<float>, std::vector<float>> true_positives(const eval::MatchedPixels& px, double thr)
{
    std::vector<float> est, ref;
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (quantiles::is_rain(px.est[i], thr) && quantiles::is_rain(px.ref[i], thr)) {
            est.push_back(px.est[i]);
            ref.push_back(px.ref[i]);
        }
    }
    return {std::move(est), std::move(ref)};
}

std::optional<eval::DensityScatter> scatter_or_none(std::span<const float> est, std::span<const float> ref,
                                                    std::span<const double> edges)
{
    std::size_t finite = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        finite += std::isfinite(est[i]) && std::isfinite(ref[i]);
    }
    if (finite < 2) {
        return std::nullopt;
    }
    return eval::density_scatter(est, ref, edges, edges);
}

eval::LinearFit empty_fit()
{
    return {kNaN, kNaN, kNaN, 0};
}

CsvTable empty_scatter_csv()
{
    return CsvTable({"ref_lo", "ref_hi", "est_lo", "est_hi", "count"});
}

/// Mosaic reference co-located onto each scene that has mosaic frames.
std::vector<std::pair<const SceneData*, RainField>> mosaic_references(const std::vector<SceneData>& scenes,
                                                                      const EvaluateOptions& opt)
{
    std::vector<std::pair<const SceneData*, RainField>> out;
    for (const auto& d : scenes) {
        if (d.entry->mosaic.empty()) {
            continue;
        }
        std::vector<colocation::MosaicFrame> frames;
        for (const auto& p : d.entry->mosaic) {
            frames.push_back(colocation::read_mosaic(p));
        }
        std::stable_sort(frames.begin(), frames.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; });
        const auto& frame = colocation::nearest_time_frame(frames, colocation::overpass_mid_time(d.ref.geo()));
        const auto samples =
            colocation::mosaic_samples(colocation::mosaic_to_rate(frame, opt.quality_min), opt.mosaic_box);
        out.emplace_back(&d, colocation::colocate_radius_mean(samples, d.ref.geo(), opt.radius_km));
    }
    return out;
}

}  // namespace

void cmd_evaluate(const RunConfig& cfg, std::ostream& log)
{
    const auto& opt = cfg.evaluate;
    const double thr = opt.threshold;
    const auto manifest = read_manifest(opt.dataset);
    const fs::path mask_path = !opt.mask.empty() ? opt.mask : manifest.mask;
    const SurfaceMask mask = mask_path.empty() ? SurfaceMask::uniform(SurfaceClass::Ocean) : read_mask(mask_path);
    const auto scenes = load_scenes(manifest, opt.split, opt.retrieval);
    const bool with_external = std::all_of(scenes.begin(), scenes.end(), [](const auto& d) { return d.external; });

    std::vector<Estimator> est;
    est.push_back({"drain", {}});
    if (with_external) {
        est.push_back({"external", {}});
    }
    for (const auto& d : scenes) {
        est[0].px.append(d.ref, d.qf);
        if (with_external) {
            est[1].px.append(d.ref, *d.external);
        }
    }

    const auto want = [&](const char* table) {
        return std::find(opt.tables.begin(), opt.tables.end(), table) != opt.tables.end();
    };
    StagingDir stage(opt.out);

    std::vector<eval::NamedTable> tables;
    for (const auto& e : est) {
        const auto t = eval::stratify_by_surface(
            e.px, mask, [&](const eval::MatchedPixels& p) { return eval::count_contingency(p.est, p.ref, thr); });
        if (t.total.total() == 0.0) {
            throw DataError("no co-located pixels between " + e.name + " and the reference");
        }
        for (const auto s : kStrata) {
            tables.push_back({eval::to_string(s), e.name, t[s]});
        }
    }
    if (want("contingency")) {
        eval::contingency_csv(tables).save(stage / "contingency.csv");
    }
    if (want("scores")) {
        eval::scores_csv(tables).save(stage / "scores.csv");
    }
    if (want("bias_rmse")) {
        std::vector<eval::NamedBiasRmse> rows;
        for (const auto s : kStrata) {
            for (const auto& e : est) {
                const auto t = eval::stratify_by_surface(e.px, mask, [&](const eval::MatchedPixels& p) {
                    return eval::conditional_bias_rmse(p.est, p.ref, thr);
                });
                rows.push_back({eval::to_string(s), e.name, t[s]});
            }
        }
        eval::bias_rmse_csv(rows).save(stage / "bias_rmse.csv");
    }
    if (want("error_stats")) {
        std::vector<eval::NamedErrorStats> rows;
        for (const auto& e : est) {
            const auto t = eval::stratify_by_surface(e.px, mask, [&](const eval::MatchedPixels& p) {
                return eval::error_conditional_stats(p.est, p.ref, thr);
            });
            for (const auto s : kStrata) {
                rows.push_back({eval::to_string(s), e.name, t[s]});
            }
        }
        eval::error_stats_csv(rows).save(stage / "error_stats.csv");
    }
    if (want("coverage")) {
        const auto t = eval::stratify_by_surface(est[0].px, mask, [&](const eval::MatchedPixels& p) {
            return eval::coverage_table({p.est, p.ref, p.lo50, p.hi50, p.lo90, p.hi90},
                                        eval::default_coverage_edges(), thr);
        });
        eval::coverage_csv(t.total).save(stage / "coverage.csv");
        eval::coverage_csv(t.land).save(stage / "coverage_land.csv");
        eval::coverage_csv(t.ocean).save(stage / "coverage_ocean.csv");
    }
    if (want("histogram")) {
        std::vector<eval::NamedValues> fields{{"reference", est[0].px.ref}};
        for (const auto& e : est) {
            fields.push_back({e.name, e.px.est});
        }
        eval::histogram_csv(eval::intensity_histogram(fields, eval::default_intensity_edges(), thr))
            .save(stage / "histogram.csv");
    }
    if (want("scatter")) {
        const auto edges = eval::linear_edges(0.0, 100.0, 100);
        std::vector<std::pair<std::string, eval::LinearFit>> fits;
        for (const auto& e : est) {
            const auto [x_est, x_ref] = true_positives(e.px, thr);
            const auto s = scatter_or_none(x_est, x_ref, edges);
            (s ? eval::scatter_csv(*s) : empty_scatter_csv()).save(stage / ("scatter_" + e.name + ".csv"));
            fits.emplace_back(e.name, s ? s->fit : empty_fit());
        }
        eval::fit_csv(fits).save(stage / "regression.csv");
    }
    if (want("grid_diff")) {
        const auto spec = GridSpec::global(opt.cell_deg);
        for (const auto& e : est) {
            grid_csv(eval::pixel_difference_grid(e.px.lat, e.px.lon, e.px.ref, e.px.est, spec))
                .save(stage / ("grid_diff_" + e.name + ".csv"));
        }
    }
    if (want("mae_by_time")) {
        std::vector<eval::NamedSeries> series;
        for (std::size_t k = 0; k < est.size(); ++k) {
            std::vector<eval::OverpassPair> pairs;
            for (const auto& d : scenes) {
                const auto& field = k == 0 ? d.drain : *d.external;
                pairs.push_back({colocation::overpass_mid_time(d.ref.geo()), field.values(), d.ref.values()});
            }
            series.push_back({est[k].name, eval::mae_by_time(pairs, eval::TimeBucket::Month, thr)});
        }
        eval::mae_csv(series).save(stage / "mae_by_time.csv");
    }

    const bool mosaic_wanted = want("mosaic_detection") || want("mosaic_scatter") || want("mosaic_grid_diff");
    std::size_t mosaic_scenes = 0;
    if (mosaic_wanted) {
        const auto refs = mosaic_references(scenes, opt);
        mosaic_scenes = refs.size();
        std::vector<Estimator> mest{{"drain", {}}, {"reference", {}}};
        if (with_external) {
            mest.push_back({"external", {}});
        }
        for (const auto& [d, mref] : refs) {
            mest[0].px.append(mref, d->drain);
            mest[1].px.append(mref, d->ref);
            if (with_external) {
                mest[2].px.append(mref, *d->external);
            }
        }
        const auto spec = GridSpec::covering(opt.mosaic_box, opt.mosaic_cell_deg);
        const auto edges = eval::linear_edges(0.0, 20.0, 80);
        std::vector<std::pair<std::string, eval::LinearFit>> fits;
        for (const auto& e : mest) {
            if (want("mosaic_detection")) {
                eval::detection_table_csv({"mosaic", e.name, eval::count_contingency(e.px.est, e.px.ref, thr)})
                    .save(stage / ("mosaic_detection_" + e.name + ".csv"));
            }
            if (!want("mosaic_scatter") && !want("mosaic_grid_diff")) {
                continue;
            }
            // Only pixels where both sides are finite, so each cell is fully paired.
            std::vector<float> lat, lon, ref, val;
            for (std::size_t i = 0; i < e.px.size(); ++i) {
                if (std::isfinite(e.px.ref[i]) && std::isfinite(e.px.est[i])) {
                    lat.push_back(e.px.lat[i]);
                    lon.push_back(e.px.lon[i]);
                    ref.push_back(e.px.ref[i]);
                    val.push_back(e.px.est[i]);
                }
            }
            const double all = -std::numeric_limits<double>::infinity();
            const auto ref_grid = colocation::grid_average(lat, lon, ref, spec, all);
            const auto est_grid = colocation::grid_average(lat, lon, val, spec, all);
            if (want("mosaic_grid_diff")) {
                grid_csv(eval::grid_difference(ref_grid, est_grid), true)
                    .save(stage / ("mosaic_grid_diff_" + e.name + ".csv"));
            }
            if (want("mosaic_scatter")) {
                std::vector<float> gx, gy;
                for (std::size_t k = 0; k < spec.size(); ++k) {
                    if (ref_grid.count[k] > 0 && est_grid.count[k] > 0) {
                        gx.push_back(static_cast<float>(ref_grid.mean[k]));
                        gy.push_back(static_cast<float>(est_grid.mean[k]));
                    }
                }
                const auto s = scatter_or_none(gy, gx, edges);
                (s ? eval::scatter_csv(*s) : empty_scatter_csv())
                    .save(stage / ("mosaic_scatter_" + e.name + ".csv"));
                fits.emplace_back(e.name, s ? s->fit : empty_fit());
            }
        }
        if (want("mosaic_scatter")) {
            eval::fit_csv(fits).save(stage / "mosaic_regression.csv");
        }
    }

    stage.write_config(cfg);
    stage.commit();
    const auto s = eval::scores(tables[2].table);
    log << "evaluate: " << scenes.size() << " scenes, " << est[0].px.size() << " pixels, drain POD "
        << format_number(s.pod) << " FAR " << format_number(s.far);
    if (mosaic_wanted) {
        log << ", " << mosaic_scenes << " mosaic scenes";
    }
    log << " -> " << opt.out.string() << "\n";
}

void cmd_grid_diff(const RunConfig& cfg, std::ostream& log)
{
    const auto& opt = cfg.grid_diff;
    const auto manifest = read_manifest(opt.dataset);
    const auto scenes = load_scenes(manifest, opt.split, opt.retrieval);
    eval::MatchedPixels px;
    for (const auto& d : scenes) {
        if (opt.estimator == "drain") {
            px.append(d.ref, d.drain);
        } else if (d.external) {
            px.append(d.ref, *d.external);
        } else {
            throw DataError("scene " + d.entry->id + " has no external estimate");
        }
    }
    const auto spec = GridSpec::global(opt.cell_deg);
    GridField grid;
    if (opt.mode == "pixel") {
        grid = eval::pixel_difference_grid(px.lat, px.lon, px.ref, px.est, spec);
    } else {
        const double all = -std::numeric_limits<double>::infinity();
        grid = eval::grid_difference(colocation::grid_average(px.lat, px.lon, px.ref, spec, all),
                                     colocation::grid_average(px.lat, px.lon, px.est, spec, all));
    }
    StagingDir stage(opt.out);
    grid_csv(grid).save(stage / "grid_diff.csv");
    stage.write_config(cfg);
    stage.commit();
    std::size_t occupied = 0;
    for (const auto c : grid.count) {
        occupied += c > 0;
    }
    log << "grid-diff: " << opt.estimator << " (" << opt.mode << " path), " << occupied << " occupied cells at "
        << format_number(opt.cell_deg) << " deg -> " << opt.out.string() << "\n";
}

}  // namespace drain::cli
