#include <ostream>

#include "common.hpp"
#include "drain/checkpoint.hpp"
#include "drain/cli/commands.hpp"
#include "drain/csv.hpp"
#include "drain/errors.hpp"
#include "drain/quantiles.hpp"
#include "drain/swath_io.hpp"

namespace drain::cli {

using namespace detail;

namespace {

std::vector<qunet::Sample> load_samples(const Manifest& m, const std::string& split)
{
    std::vector<qunet::Sample> out;
    for (const auto* s : m.in_split(split)) {
        const auto tb = read_tb_scene(s->tb);
        const auto ref = read_rain_field(s->ref);
        if (!ref.geo().same_grid(tb.geo())) {
            throw DataError("scene " + s->id + ": reference grid differs from the TB grid");
        }
        out.push_back({m.normalizer.apply(tb), {ref.values().begin(), ref.values().end()}});
    }
    return out;
}

bool same_normalizer(const dataset::Normalizer& a, const dataset::Normalizer& b)
{
    return a.mean == b.mean && a.stddev == b.stddev;
}

}  // namespace

void cmd_train(const RunConfig& cfg, std::ostream& log)
{
    const auto& opt = cfg.train;
    opt.train.validate();
    cfg.model.validate();
    const auto manifest = read_manifest(opt.dataset);
    const auto train_set = load_samples(manifest, "train");
    const auto val_set = load_samples(manifest, "val");
    if (train_set.empty()) {
        throw DataError("dataset " + opt.dataset.string() + " has an empty training split");
    }

    qunet::TrainState state = qunet::initial_state(cfg.model);
    qunet::ModelConfig model_cfg = cfg.model;
    if (!opt.resume.empty()) {
        const auto ckpt = qunet::read_checkpoint(opt.resume);
        if (!same_normalizer(ckpt.normalizer, manifest.normalizer)) {
            throw DataError("checkpoint " + opt.resume.string() + " was trained on a different dataset");
        }
        model_cfg = ckpt.model;
        state = qunet::restore_state(ckpt);
        log << "train: resuming from epoch " << state.history.size() << "\n";
    }

    StagingDir stage(opt.out);
    state = qunet::train(std::move(state), opt.train, train_set, val_set, [&](const qunet::TrainState& s) {
        const auto& r = s.history.back();
        log << "train: epoch " << r.epoch << " train_loss " << format_number(r.train_loss) << " val_loss "
            << format_number(r.val_loss) << "\n";
    });

    qunet::Checkpoint ckpt;
    ckpt.model = model_cfg;
    ckpt.train = opt.train;
    ckpt.normalizer = manifest.normalizer;
    ckpt.history = state.history;
    ckpt.params.assign(state.model.params().begin(), state.model.params().end());
    ckpt.adam = state.adam;
    qunet::write_checkpoint(stage / "model.qnt", ckpt);

    CsvTable history({"epoch", "train_loss", "val_loss"});
    for (const auto& r : state.history) {
        history.row({std::to_string(r.epoch), format_number(r.train_loss), format_number(r.val_loss)});
    }
    history.save(stage / "history.csv");
    stage.write_config(cfg);
    stage.commit();
    log << "train: " << state.history.size() << " epochs, " << state.model.parameter_count() << " parameters -> "
        << opt.out.string() << "\n";
}

void cmd_retrieve(const RunConfig& cfg, std::ostream& log)
{
    const auto& opt = cfg.retrieve;
    const auto ckpt = qunet::read_checkpoint(opt.model);
    const qunet::UNet<float> model(ckpt.model, ckpt.params);
    const auto manifest = read_manifest(opt.dataset);
    const auto scenes = manifest.in_split(opt.split);
    if (scenes.empty()) {
        throw DataError("split '" + opt.split + "' of " + opt.dataset.string() + " is empty");
    }
    const std::size_t m = ckpt.model.tile_multiple();

    StagingDir stage(opt.out);
    for (const auto* s : scenes) {
        auto tb = read_tb_scene(s->tb);
        if (tb.n_scan() % m != 0 || tb.n_pix() % m != 0) {
            if (!opt.crop) {
                throw TileError("scene " + s->id + " is " + std::to_string(tb.n_scan()) + "x" +
                                std::to_string(tb.n_pix()) + ", not a multiple of " + std::to_string(m) +
                                "; crop it to tile (set retrieve.crop to true)");
            }
            tb = crop_to_tile(tb, m);
        }
        const auto qf = quantiles::monotonize(qunet::predict(model, ckpt.normalizer.apply(tb), tb.geo()));
        write_swath(stage / (s->id + ".quantiles.swt"), qf);
        write_swath(stage / (s->id + ".median.swt"), quantiles::point_estimate(qf, 0.5));
    }
    stage.write_config(cfg);
    stage.commit();
    log << "retrieve: " << scenes.size() << " scenes -> " << opt.out.string() << "\n";
}

}  // namespace drain::cli
