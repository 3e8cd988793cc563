#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "common.hpp"
#include "drain/cli/commands.hpp"
#include "drain/errors.hpp"
#include "drain/mosaic.hpp"
#include "drain/swath_io.hpp"

namespace drain::cli {

using namespace detail;

namespace {

struct Candidate {
    std::string id;
    TbScene tb;
    RainField ref;
    std::optional<RainField> external;
    std::optional<dataset::RainCellModel> model;
};

std::vector<double> mosaic_times(double mid, const MosaicOptions& opt)
{
    const double step = opt.frame_step_s;
    const double first = std::floor(mid / step) * step - step * static_cast<double>((opt.frames - 1) / 2);
    std::vector<double> t(opt.frames);
    for (std::size_t k = 0; k < opt.frames; ++k) {
        t[k] = first + step * static_cast<double>(k);
    }
    return t;
}

std::vector<fs::path> list_tb_files(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw DataError("dataset.input_dir " + dir.string() + " is not a directory");
    }
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.size() > 7 && name.ends_with(".tb.swt")) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void cmd_build_dataset(const RunConfig& cfg, std::ostream& log)
{
    const auto& opt = cfg.dataset;
    opt.selection.validate();
    opt.synth.validate();
    const double fsum = opt.split[0] + opt.split[1] + opt.split[2];
    if (std::abs(fsum - 1.0) > 1e-9 || *std::min_element(opt.split.begin(), opt.split.end()) < 0.0) {
        throw UsageError("config field 'dataset.split' must be three non-negative fractions summing to 1");
    }

    StagingDir stage(opt.dir);
    fs::create_directories(stage / "scenes");

    const SurfaceMask mask =
        opt.mask.empty() ? dataset::synth_surface_mask(opt.mask_cell_deg, cfg.seed) : read_mask(opt.mask);
    write_mask(stage / "mask.msk", mask);

    // Selected scenes are written immediately; only their ids and (for the
    // synthetic source) rain-cell models are kept in memory.
    std::vector<std::string> ids;
    std::vector<bool> has_external;
    std::vector<std::optional<dataset::RainCellModel>> models;
    std::size_t candidates = 0;
    auto keep = [&](Candidate c) {
        if (!dataset::select_scene(c.ref, opt.selection)) {
            return;
        }
        write_swath(stage / "scenes" / (c.id + ".tb.swt"), c.tb);
        write_swath(stage / "scenes" / (c.id + ".ref.swt"), c.ref);
        if (c.external) {
            write_swath(stage / "scenes" / (c.id + ".external.swt"), *c.external);
        }
        ids.push_back(c.id);
        has_external.push_back(c.external.has_value());
        models.push_back(std::move(c.model));
    };

    if (opt.source == "synthetic") {
        if (opt.synth.n_scan % opt.tile_multiple != 0 || opt.synth.n_pix % opt.tile_multiple != 0) {
            throw UsageError("config fields 'dataset.synth.n_scan' and 'n_pix' must be multiples of "
                             "dataset.tile_multiple");
        }
        for (std::size_t i = 0; i < opt.n_scenes; ++i) {
            auto s = dataset::synth_scene(opt.synth, mask, i);
            ++candidates;
            auto ext = dataset::pixelwise_estimate(s.tb, opt.synth);
            keep({s.tb.granule_id(), std::move(s.tb), std::move(s.reference), std::move(ext), std::move(s.model)});
        }
    } else {
        for (const auto& tb_path : list_tb_files(opt.input_dir)) {
            const auto name = tb_path.filename().string();
            const auto id = name.substr(0, name.size() - 7);
            const auto ref_path = opt.input_dir / (id + ".ref.swt");
            const auto ext_path = opt.input_dir / (id + ".external.swt");
            if (!fs::exists(ref_path)) {
                throw DataError("scene " + id + " has no reference file " + ref_path.string());
            }
            ++candidates;
            auto tb = crop_to_tile(read_tb_scene(tb_path), opt.tile_multiple);
            auto ref = crop_to_tile(read_rain_field(ref_path, Provenance::Reference), opt.tile_multiple);
            if (!ref.geo().same_grid(tb.geo())) {
                throw DataError("scene " + id + ": reference grid differs from the TB grid");
            }
            std::optional<RainField> ext;
            if (fs::exists(ext_path)) {
                ext = crop_to_tile(read_rain_field(ext_path, Provenance::ExternalEstimator), opt.tile_multiple);
            }
            keep({id, std::move(tb), std::move(ref), std::move(ext), std::nullopt});
        }
    }
    if (ids.empty()) {
        throw DataError("0 scenes selected out of " + std::to_string(candidates) +
                        " candidates; loosen dataset.selection or generate more scenes");
    }

    const auto split = dataset::split_dataset(ids.size(), opt.split, cfg.seed);
    std::vector<std::string> split_of(ids.size());
    for (auto i : split.train) split_of[i] = "train";
    for (auto i : split.val) split_of[i] = "val";
    for (auto i : split.test) split_of[i] = "test";
    if (split.train.size() < 2) {
        throw DataError("training split has " + std::to_string(split.train.size()) +
                        " scenes; the normalizer needs at least two");
    }

    std::vector<TbScene> train_tb;
    for (auto i : split.train) {
        train_tb.push_back(read_tb_scene(stage / "scenes" / (ids[i] + ".tb.swt")));
    }
    const auto norm = dataset::fit_normalizer(train_tb);
    train_tb.clear();

    // Mosaic frames for the first test scenes in index order.
    std::vector<std::vector<std::string>> mosaic_files(ids.size());
    if (opt.mosaic.scenes > 0 && opt.mosaic.frames > 0) {
        fs::create_directories(stage / "mosaic");
        auto test = split.test;
        std::sort(test.begin(), test.end());
        std::size_t made = 0;
        for (auto i : test) {
            if (made == opt.mosaic.scenes || !models[i]) {
                continue;
            }
            const auto& model = *models[i];
            const auto geo = model.geolocation();
            std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                              static_cast<std::uint32_t>(i), 0x6d6f73u};
            dataset::Rng rng(seq);
            std::vector<colocation::MosaicFrame> frames;
            try {
                frames = dataset::synth_mosaic_frames(model, opt.mosaic.cell_deg,
                                                      mosaic_times(colocation::overpass_mid_time(geo), opt.mosaic),
                                                      rng);
            } catch (const DataError&) {
                continue;  // scene crosses the antimeridian
            }
            for (std::size_t k = 0; k < frames.size(); ++k) {
                const auto rel = "mosaic/" + ids[i] + "_" + std::to_string(k) + ".mos";
                write_mosaic(stage / rel, frames[k]);
                mosaic_files[i].push_back(rel);
            }
            ++made;
        }
    }

    json scenes = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        scenes.push_back({{"id", ids[i]},
                          {"split", split_of[i]},
                          {"tb", "scenes/" + ids[i] + ".tb.swt"},
                          {"ref", "scenes/" + ids[i] + ".ref.swt"},
                          {"external", has_external[i] ? "scenes/" + ids[i] + ".external.swt" : ""},
                          {"mosaic", mosaic_files[i]}});
    }
    json manifest;
    manifest["format"] = "drain-dataset";
    manifest["version"] = 1;
    manifest["seed"] = cfg.seed;
    manifest["source"] = opt.source;
    manifest["candidates"] = candidates;
    manifest["selected"] = ids.size();
    manifest["split_counts"] = {{"train", split.train.size()}, {"val", split.val.size()}, {"test", split.test.size()}};
    manifest["config"] = json::parse(cfg.resolved_json).at("dataset");
    manifest["normalizer"] = {{"mean", norm.mean}, {"stddev", norm.stddev}};
    manifest["mask"] = "mask.msk";
    manifest["scenes"] = std::move(scenes);
    write_json(stage / "manifest.json", manifest);
    stage.write_config(cfg);
    stage.commit();
    log << "build-dataset: " << ids.size() << " of " << candidates << " scenes selected (train "
        << split.train.size() << ", val " << split.val.size() << ", test " << split.test.size() << ") -> "
        << opt.dir.string() << "\n";
}

}  // namespace drain::cli
