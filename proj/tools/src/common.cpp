#include "common.hpp"

#include <fstream>

#include "drain/csv.hpp"
#include "drain/errors.hpp"

namespace drain::cli::detail {

StagingDir::StagingDir(fs::path out) : out_(std::move(out))
{
    if (out_.empty()) {
        throw UsageError("output directory is empty");
    }
    tmp_ = out_;
    tmp_ += ".partial";
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
}

StagingDir::~StagingDir()
{
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(tmp_, ec);
    }
}

void StagingDir::write_config(const RunConfig& cfg) const
{
    write_text_file(tmp_ / "config.resolved.json", cfg.resolved_json);
}

void StagingDir::commit()
{
    fs::remove_all(out_);
    if (out_.has_parent_path()) {
        fs::create_directories(out_.parent_path());
    }
    fs::rename(tmp_, out_);
    committed_ = true;
}

void write_json(const fs::path& path, const json& j)
{
    write_text_file(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<const SceneEntry*> Manifest::in_split(const std::string& split) const
{
    if (split != "train" && split != "val" && split != "test" && split != "all") {
        throw UsageError("split must be train, val, test or all (got '" + split + "')");
    }
    std::vector<const SceneEntry*> out;
    for (const auto& s : scenes) {
        if (split == "all" || s.split == split) {
            out.push_back(&s);
        }
    }
    return out;
}

Manifest read_manifest(const fs::path& dataset_dir)
{
    const auto path = dataset_dir / "manifest.json";
    if (!fs::exists(path)) {
        throw DataError("no dataset manifest at " + path.string() + "; run build-dataset first");
    }
    const json j = read_json(path);
    Manifest m;
    m.dir = dataset_dir;
    try {
        m.seed = j.at("seed").get<std::uint64_t>();
        m.normalizer.mean = j.at("normalizer").at("mean").get<std::array<double, kTbChannels>>();
        m.normalizer.stddev = j.at("normalizer").at("stddev").get<std::array<double, kTbChannels>>();
        const auto mask = j.at("mask").get<std::string>();
        if (!mask.empty()) {
            m.mask = dataset_dir / mask;
        }
        for (const auto& e : j.at("scenes")) {
            SceneEntry s;
            s.id = e.at("id").get<std::string>();
            s.split = e.at("split").get<std::string>();
            s.tb = dataset_dir / e.at("tb").get<std::string>();
            s.ref = dataset_dir / e.at("ref").get<std::string>();
            const auto ext = e.at("external").get<std::string>();
            if (!ext.empty()) {
                s.external = dataset_dir / ext;
            }
            for (const auto& f : e.at("mosaic")) {
                s.mosaic.push_back(dataset_dir / f.get<std::string>());
            }
            m.scenes.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": malformed manifest: " + e.what());
    }
    return m;
}

RainField crop_rain(const RainField& f, std::size_t n_scan, std::size_t n_pix)
{
    if (f.n_scan() == n_scan && f.n_pix() == n_pix) {
        return f;
    }
    auto geo = f.geo().cropped(n_scan, n_pix);
    std::vector<float> v;
    v.reserve(n_scan * n_pix);
    for (std::size_t s = 0; s < n_scan; ++s) {
        for (std::size_t p = 0; p < n_pix; ++p) {
            v.push_back(f.at(s, p));
        }
    }
    return RainField(std::move(geo), std::move(v), f.provenance());
}

}  // namespace drain::cli::detail
