#include "drain/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "drain/errors.hpp"

namespace drain::cli {

namespace {

using nlohmann::json;

json box_json(const colocation::LatLonBox& b)
{
    return {{"lat_min", b.lat_min}, {"lat_max", b.lat_max}, {"lon_min", b.lon_min}, {"lon_max", b.lon_max}};
}

json defaults()
{
    const RunConfig d;
    const auto& s = d.dataset.synth;
    const auto& sel = d.dataset.selection;
    const auto& t = d.train.train;
    json j;
    j["seed"] = d.seed;
    j["dataset"] = {
        {"dir", d.dataset.dir.string()},
        {"source", d.dataset.source},
        {"input_dir", d.dataset.input_dir.string()},
        {"n_scenes", d.dataset.n_scenes},
        {"split", d.dataset.split},
        {"tile_multiple", d.dataset.tile_multiple},
        {"selection",
         {{"light_thresh", sel.light_thresh},
          {"light_count", sel.light_count},
          {"heavy_thresh", sel.heavy_thresh},
          {"heavy_count", sel.heavy_count}}},
        {"synth",
         {{"n_scan", s.n_scan},
          {"n_pix", s.n_pix},
          {"pixel_km", s.pixel_km},
          {"cell_rate", s.cell_rate},
          {"peak_log_mu", s.peak_log_mu},
          {"peak_log_sigma", s.peak_log_sigma},
          {"radius_min_km", s.radius_min_km},
          {"radius_max_km", s.radius_max_km},
          {"support_fraction", s.support_fraction},
          {"tb0", s.tb0},
          {"depression", s.depression},
          {"exponent", s.exponent},
          {"noise_k", s.noise_k},
          {"ocean_offset", s.ocean_offset},
          {"land_offset", s.land_offset},
          {"radar_spacing_km", s.radar_spacing_km},
          {"colocation_radius_km", s.colocation_radius_km},
          {"lat_min", s.lat_min},
          {"lat_max", s.lat_max},
          {"time_start", s.time_start},
          {"time_span", s.time_span},
          {"scan_period_s", s.scan_period_s}}},
        {"mask", d.dataset.mask.string()},
        {"mask_cell_deg", d.dataset.mask_cell_deg},
        {"mosaic",
         {{"scenes", d.dataset.mosaic.scenes},
          {"cell_deg", d.dataset.mosaic.cell_deg},
          {"frames", d.dataset.mosaic.frames},
          {"frame_step_s", d.dataset.mosaic.frame_step_s}}},
    };
    j["model"] = {{"depth", d.model.depth},
                  {"base_width", d.model.base_width},
                  {"activation", qunet::to_string(d.model.activation)},
                  {"padding", qunet::to_string(d.model.padding)}};
    j["train"] = {{"dataset", d.train.dataset.string()},
                  {"out", d.train.out.string()},
                  {"resume", d.train.resume.string()},
                  {"learning_rate", t.adam.learning_rate},
                  {"beta1", t.adam.beta1},
                  {"beta2", t.adam.beta2},
                  {"epsilon", t.adam.epsilon},
                  {"epochs", t.epochs},
                  {"batch_size", t.batch_size}};
    j["retrieve"] = {{"dataset", d.retrieve.dataset.string()},
                     {"model", d.retrieve.model.string()},
                     {"split", d.retrieve.split},
                     {"out", d.retrieve.out.string()},
                     {"crop", d.retrieve.crop}};
    j["evaluate"] = {{"dataset", d.evaluate.dataset.string()},
                     {"retrieval", d.evaluate.retrieval.string()},
                     {"split", d.evaluate.split},
                     {"out", d.evaluate.out.string()},
                     {"mask", d.evaluate.mask.string()},
                     {"threshold", d.evaluate.threshold},
                     {"cell_deg", d.evaluate.cell_deg},
                     {"mosaic_cell_deg", d.evaluate.mosaic_cell_deg},
                     {"mosaic_box", box_json(d.evaluate.mosaic_box)},
                     {"radius_km", d.evaluate.radius_km},
                     {"quality_min", d.evaluate.quality_min},
                     {"tables", all_report_tables()}};
    j["grid_diff"] = {{"dataset", d.grid_diff.dataset.string()},
                      {"retrieval", d.grid_diff.retrieval.string()},
                      {"split", d.grid_diff.split},
                      {"estimator", d.grid_diff.estimator},
                      {"mode", d.grid_diff.mode},
                      {"cell_deg", d.grid_diff.cell_deg},
                      {"out", d.grid_diff.out.string()}};
    return j;
}

void overlay(json& base, const json& patch, const std::string& path)
{
    if (!patch.is_object()) {
        throw UsageError("config field '" + (path.empty() ? std::string("<root>") : path.substr(0, path.size() - 1)) +
                         "' must be an object");
    }
    for (const auto& [key, value] : patch.items()) {
        const auto it = base.find(key);
        if (it == base.end()) {
            throw UsageError("unknown config field '" + path + key + "'");
        }
        if (it->is_object()) {
            overlay(*it, value, path + key + ".");
        } else {
            *it = value;
        }
    }
}

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    Section sub(const char* key) const { return Section(j_.at(key), path_ + key + "."); }

    double number(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number()) {
            fail(key, "a number");
        }
        return v.get<double>();
    }

    std::uint64_t count(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned()) {
            fail(key, "a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    int integer(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) {
            fail(key, "an integer");
        }
        return v.get<int>();
    }

    std::string text(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_string()) {
            fail(key, "a string");
        }
        return v.get<std::string>();
    }

    bool flag(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_boolean()) {
            fail(key, "true or false");
        }
        return v.get<bool>();
    }

    template <std::size_t N>
    std::array<double, N> numbers(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != N) {
            fail(key, "an array of " + std::to_string(N) + " numbers");
        }
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            if (!v[i].is_number()) {
                fail(key, "an array of " + std::to_string(N) + " numbers");
            }
            out[i] = v[i].get<double>();
        }
        return out;
    }

    std::vector<std::string> texts(const char* key) const
    {
        const auto& v = j_.at(key);
        std::vector<std::string> out;
        if (!v.is_array()) {
            fail(key, "an array of strings");
        }
        for (const auto& e : v) {
            if (!e.is_string()) {
                fail(key, "an array of strings");
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    [[noreturn]] void fail(const char* key, const std::string& expected) const
    {
        throw UsageError("config field '" + path_ + key + "' must be " + expected);
    }

private:
    const json& j_;
    std::string path_;
};

colocation::LatLonBox read_box(const Section& s)
{
    colocation::LatLonBox b;
    b.lat_min = s.number("lat_min");
    b.lat_max = s.number("lat_max");
    b.lon_min = s.number("lon_min");
    b.lon_max = s.number("lon_max");
    if (!(b.lat_min <= b.lat_max && b.lon_min <= b.lon_max)) {
        s.fail("lat_min", "no larger than lat_max (and lon_min no larger than lon_max)");
    }
    return b;
}

qunet::Activation read_activation(const Section& s)
{
    const auto v = s.text("activation");
    if (v == "relu") {
        return qunet::Activation::Relu;
    }
    if (v == "leaky_relu") {
        return qunet::Activation::LeakyRelu;
    }
    s.fail("activation", "\"relu\" or \"leaky_relu\"");
}

qunet::Padding read_padding(const Section& s)
{
    const auto v = s.text("padding");
    if (v == "zero") {
        return qunet::Padding::Zero;
    }
    if (v == "periodic") {
        return qunet::Padding::Periodic;
    }
    s.fail("padding", "\"zero\" or \"periodic\"");
}

RunConfig parse(const json& j)
{
    RunConfig c;
    const Section root(j, "");
    c.seed = root.count("seed");

    const auto ds = root.sub("dataset");
    c.dataset.dir = ds.text("dir");
    c.dataset.source = ds.text("source");
    if (c.dataset.source != "synthetic" && c.dataset.source != "swt") {
        ds.fail("source", "\"synthetic\" or \"swt\"");
    }
    c.dataset.input_dir = ds.text("input_dir");
    c.dataset.n_scenes = ds.count("n_scenes");
    c.dataset.split = ds.numbers<3>("split");
    c.dataset.tile_multiple = ds.count("tile_multiple");
    if (c.dataset.tile_multiple == 0) {
        ds.fail("tile_multiple", "at least 1");
    }
    const auto sel = ds.sub("selection");
    c.dataset.selection.light_thresh = sel.number("light_thresh");
    c.dataset.selection.light_count = sel.count("light_count");
    c.dataset.selection.heavy_thresh = sel.number("heavy_thresh");
    c.dataset.selection.heavy_count = sel.count("heavy_count");
    auto& s = c.dataset.synth;
    const auto sy = ds.sub("synth");
    s.n_scan = sy.count("n_scan");
    s.n_pix = sy.count("n_pix");
    s.pixel_km = sy.number("pixel_km");
    s.cell_rate = sy.number("cell_rate");
    s.peak_log_mu = sy.number("peak_log_mu");
    s.peak_log_sigma = sy.number("peak_log_sigma");
    s.radius_min_km = sy.number("radius_min_km");
    s.radius_max_km = sy.number("radius_max_km");
    s.support_fraction = sy.number("support_fraction");
    s.tb0 = sy.numbers<kTbChannels>("tb0");
    s.depression = sy.numbers<kTbChannels>("depression");
    s.exponent = sy.numbers<kTbChannels>("exponent");
    s.noise_k = sy.numbers<kTbChannels>("noise_k");
    s.ocean_offset = sy.numbers<kTbChannels>("ocean_offset");
    s.land_offset = sy.numbers<kTbChannels>("land_offset");
    s.radar_spacing_km = sy.number("radar_spacing_km");
    s.colocation_radius_km = sy.number("colocation_radius_km");
    s.lat_min = sy.number("lat_min");
    s.lat_max = sy.number("lat_max");
    s.time_start = sy.number("time_start");
    s.time_span = sy.number("time_span");
    s.scan_period_s = sy.number("scan_period_s");
    s.seed = c.seed;
    c.dataset.mask = ds.text("mask");
    c.dataset.mask_cell_deg = ds.number("mask_cell_deg");
    const auto mo = ds.sub("mosaic");
    c.dataset.mosaic.scenes = mo.count("scenes");
    c.dataset.mosaic.cell_deg = mo.number("cell_deg");
    c.dataset.mosaic.frames = mo.count("frames");
    c.dataset.mosaic.frame_step_s = mo.number("frame_step_s");
    if (!(c.dataset.mosaic.cell_deg > 0.0) || !(c.dataset.mosaic.frame_step_s > 0.0)) {
        mo.fail("cell_deg", "positive (as must frame_step_s)");
    }

    const auto md = root.sub("model");
    c.model.depth = md.count("depth");
    c.model.base_width = md.count("base_width");
    c.model.activation = read_activation(md);
    c.model.padding = read_padding(md);
    c.model.init_seed = c.seed;

    const auto tr = root.sub("train");
    c.train.dataset = tr.text("dataset");
    c.train.out = tr.text("out");
    c.train.resume = tr.text("resume");
    c.train.train.adam.learning_rate = tr.number("learning_rate");
    c.train.train.adam.beta1 = tr.number("beta1");
    c.train.train.adam.beta2 = tr.number("beta2");
    c.train.train.adam.epsilon = tr.number("epsilon");
    c.train.train.epochs = tr.count("epochs");
    c.train.train.batch_size = tr.count("batch_size");
    c.train.train.seed = c.seed;

    const auto rt = root.sub("retrieve");
    c.retrieve.dataset = rt.text("dataset");
    c.retrieve.model = rt.text("model");
    c.retrieve.split = rt.text("split");
    c.retrieve.out = rt.text("out");
    c.retrieve.crop = rt.flag("crop");

    const auto ev = root.sub("evaluate");
    c.evaluate.dataset = ev.text("dataset");
    c.evaluate.retrieval = ev.text("retrieval");
    c.evaluate.split = ev.text("split");
    c.evaluate.out = ev.text("out");
    c.evaluate.mask = ev.text("mask");
    c.evaluate.threshold = ev.number("threshold");
    c.evaluate.cell_deg = ev.number("cell_deg");
    c.evaluate.mosaic_cell_deg = ev.number("mosaic_cell_deg");
    c.evaluate.mosaic_box = read_box(ev.sub("mosaic_box"));
    c.evaluate.radius_km = ev.number("radius_km");
    c.evaluate.quality_min = ev.integer("quality_min");
    c.evaluate.tables = ev.texts("tables");
    for (const auto& t : c.evaluate.tables) {
        const auto& known = all_report_tables();
        if (std::find(known.begin(), known.end(), t) == known.end()) {
            throw UsageError("config field 'evaluate.tables' names unknown table '" + t + "'");
        }
    }
    if (!(c.evaluate.threshold >= 0.0)) {
        ev.fail("threshold", "non-negative");
    }
    if (!(c.evaluate.cell_deg > 0.0) || !(c.evaluate.mosaic_cell_deg > 0.0) || !(c.evaluate.radius_km > 0.0)) {
        ev.fail("cell_deg", "positive (as must mosaic_cell_deg and radius_km)");
    }

    const auto gd = root.sub("grid_diff");
    c.grid_diff.dataset = gd.text("dataset");
    c.grid_diff.retrieval = gd.text("retrieval");
    c.grid_diff.split = gd.text("split");
    c.grid_diff.estimator = gd.text("estimator");
    if (c.grid_diff.estimator != "drain" && c.grid_diff.estimator != "external") {
        gd.fail("estimator", "\"drain\" or \"external\"");
    }
    c.grid_diff.mode = gd.text("mode");
    if (c.grid_diff.mode != "pixel" && c.grid_diff.mode != "grid") {
        gd.fail("mode", "\"pixel\" or \"grid\"");
    }
    c.grid_diff.cell_deg = gd.number("cell_deg");
    if (!(c.grid_diff.cell_deg > 0.0)) {
        gd.fail("cell_deg", "positive");
    }
    c.grid_diff.out = gd.text("out");
    return c;
}

}  // namespace

const std::vector<std::string>& all_report_tables()
{
    static const std::vector<std::string> tables{
        "contingency", "scores",      "bias_rmse",  "error_stats", "coverage",      "histogram",
        "scatter",     "grid_diff",   "mae_by_time", "mosaic_detection", "mosaic_scatter", "mosaic_grid_diff"};
    return tables;
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file, const FlagOverrides& flags,
                         const std::string& command)
{
    json j = defaults();
    if (file) {
        std::ifstream in(*file);
        if (!in) {
            throw UsageError("cannot open config file " + file->string());
        }
        json patch;
        try {
            patch = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("config file " + file->string() + " is not valid JSON: " + e.what());
        }
        overlay(j, patch, "");
    }
    if (flags.seed) {
        j["seed"] = *flags.seed;
    }
    if (flags.out) {
        static const std::map<std::string, std::pair<const char*, const char*>> out_field{
            {"build-dataset", {"dataset", "dir"}}, {"train", {"train", "out"}},
            {"retrieve", {"retrieve", "out"}},     {"evaluate", {"evaluate", "out"}},
            {"grid-diff", {"grid_diff", "out"}}};
        const auto& [section, key] = out_field.at(command);
        j[section][key] = *flags.out;
    }
    if (flags.threshold) {
        j["evaluate"]["threshold"] = *flags.threshold;
    }
    if (flags.cell_deg) {
        j["evaluate"]["cell_deg"] = *flags.cell_deg;
        j["grid_diff"]["cell_deg"] = *flags.cell_deg;
    }
    if (flags.mask) {
        j["dataset"]["mask"] = *flags.mask;
        j["evaluate"]["mask"] = *flags.mask;
    }
    RunConfig c;
    try {
        c = parse(j);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    c.resolved_json = j.dump(2) + "\n";
    return c;
}

}  // namespace drain::cli
