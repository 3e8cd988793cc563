#pragma once

// Run configuration: built-in defaults, overlaid by a JSON file, overlaid by
// command-line flags. The fully resolved document is written next to every
// command's outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "drain/colocation.hpp"
#include "drain/selection.hpp"
#include "drain/synth.hpp"
#include "drain/trainer.hpp"
#include "drain/unet.hpp"

namespace drain::cli {

struct FlagOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> threshold;
    std::optional<double> cell_deg;
    std::optional<std::string> mask;
};

struct MosaicOptions {
    std::size_t scenes = 10;  // test scenes that get synthetic mosaic frames
    double cell_deg = 0.02;
    std::size_t frames = 3;
    double frame_step_s = 300.0;
};

struct DatasetOptions {
    std::filesystem::path dir = "data";
    std::string source = "synthetic";  // "synthetic" or "swt"
    std::filesystem::path input_dir;   // for "swt": <id>.tb.swt + <id>.ref.swt (+ <id>.ext.swt)
    std::size_t n_scenes = 200;
    std::array<double, 3> split{0.7, 0.15, 0.15};
    std::size_t tile_multiple = 16;
    dataset::SceneSelectionRule selection;
    dataset::SynthConfig synth;
    std::filesystem::path mask;  // empty: synthetic mask
    double mask_cell_deg = 1.0;
    MosaicOptions mosaic;
};

struct TrainOptions {
    std::filesystem::path dataset = "data";
    std::filesystem::path out = "model";
    std::filesystem::path resume;
    qunet::TrainConfig train;
};

struct RetrieveOptions {
    std::filesystem::path dataset = "data";
    std::filesystem::path model = "model/model.qnt";
    std::string split = "test";
    std::filesystem::path out = "retrieval";
    bool crop = false;
};

struct EvaluateOptions {
    std::filesystem::path dataset = "data";
    std::filesystem::path retrieval = "retrieval";
    std::string split = "test";
    std::filesystem::path out = "report";
    std::filesystem::path mask;  // empty: the dataset's mask
    double threshold = 1e-4;
    double cell_deg = 1.0;
    double mosaic_cell_deg = 0.2;
    colocation::LatLonBox mosaic_box{};
    double radius_km = colocation::kDefaultRadiusKm;
    int quality_min = 80;
    std::vector<std::string> tables;
};

struct GridDiffOptions {
    std::filesystem::path dataset = "data";
    std::filesystem::path retrieval = "retrieval";
    std::string split = "test";
    std::string estimator = "drain";  // "drain" or "external"
    std::string mode = "pixel";       // "pixel" (difference then grid) or "grid" (grid then difference)
    double cell_deg = 1.0;
    std::filesystem::path out = "grid_diff";
};

struct RunConfig {
    std::uint64_t seed = 42;
    DatasetOptions dataset;
    qunet::ModelConfig model;
    TrainOptions train;
    RetrieveOptions retrieve;
    EvaluateOptions evaluate;
    GridDiffOptions grid_diff;

    std::string resolved_json;  // pretty-printed, stable key order
};

/// Every table the evaluate command knows how to write.
const std::vector<std::string>& all_report_tables();

/// Defaults <- config file (if any) <- flags. Unknown or mistyped fields
/// throw UsageError naming the field.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file, const FlagOverrides& flags,
                         const std::string& command);

}  // namespace drain::cli
