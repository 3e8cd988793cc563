#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "drain/cli/config.hpp"
#include "drain/normalizer.hpp"
#include "drain/swath.hpp"

namespace drain::cli::detail {

namespace fs = std::filesystem;
using nlohmann::json;

/// Output directory written through "<out>.partial" and renamed on commit.
class StagingDir {
public:
    explicit StagingDir(fs::path out);
    ~StagingDir();
    StagingDir(const StagingDir&) = delete;
    StagingDir& operator=(const StagingDir&) = delete;

    const fs::path& path() const noexcept { return tmp_; }
    fs::path operator/(const fs::path& rel) const { return tmp_ / rel; }
    void write_config(const RunConfig& cfg) const;
    void commit();

private:
    fs::path out_;
    fs::path tmp_;
    bool committed_ = false;
};

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

struct SceneEntry {
    std::string id;
    std::string split;
    fs::path tb;
    fs::path ref;
    fs::path external;  // empty when absent
    std::vector<fs::path> mosaic;
};

struct Manifest {
    fs::path dir;
    std::uint64_t seed = 0;
    dataset::Normalizer normalizer;
    fs::path mask;  // empty when absent
    std::vector<SceneEntry> scenes;

    std::vector<const SceneEntry*> in_split(const std::string& split) const;
};

Manifest read_manifest(const fs::path& dataset_dir);

/// Leading n_scan x n_pix block of a rain field.
RainField crop_rain(const RainField& f, std::size_t n_scan, std::size_t n_pix);

}  // namespace drain::cli::detail
