#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "drain/cli/commands.hpp"
#include "drain/errors.hpp"

namespace drain::cli {

namespace {

using Command = void (*)(const RunConfig&, std::ostream&);

struct CommonFlags {
    std::string config;
    FlagOverrides flags;
};

void add_common(CLI::App* sub, CommonFlags& f)
{
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option_function<std::uint64_t>("--seed", [&f](const std::uint64_t& v) { f.flags.seed = v; },
                                            "Seed for every random stream");
    sub->add_option_function<std::string>("--out", [&f](const std::string& v) { f.flags.out = v; },
                                          "Output directory of this command");
    sub->add_option_function<double>("--threshold", [&f](const double& v) { f.flags.threshold = v; },
                                     "Rain/no-rain threshold in mm/hr");
    sub->add_option_function<double>("--cell-deg", [&f](const double& v) { f.flags.cell_deg = v; },
                                     "Grid cell size in degrees");
    sub->add_option_function<std::string>("--mask", [&f](const std::string& v) { f.flags.mask = v; },
                                          "Land/ocean mask (MSK1)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantile rain retrieval from passive-microwave swaths"};
    app.name("drain");
    app.require_subcommand(1);
    const std::map<std::string, std::pair<Command, const char*>> commands{
        {"build-dataset", {&cmd_build_dataset, "Generate or ingest scenes, select, split and normalize"}},
        {"train", {&cmd_train, "Train the quantile network"}},
        {"retrieve", {&cmd_retrieve, "Run the network on a dataset split"}},
        {"evaluate", {&cmd_evaluate, "Write the verification report"}},
        {"grid-diff", {&cmd_grid_diff, "Gridded reference-minus-estimate map"}},
    };
    CommonFlags common;
    std::map<CLI::App*, Command> handlers;
    std::map<CLI::App*, std::string> names;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.second);
        add_common(sub, common);
        handlers[sub] = entry.first;
        names[sub] = name;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "drain: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        std::optional<std::filesystem::path> config_file;
        if (!common.config.empty()) {
            config_file = common.config;
        }
        const auto cfg = resolve_config(config_file, common.flags, names.at(chosen));
        handlers.at(chosen)(cfg, out);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "drain " << names.at(chosen) << ": usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "drain " << names.at(chosen) << ": numerical abort: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DataError& e) {
        err << "drain " << names.at(chosen) << ": data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "drain " << names.at(chosen) << ": data error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace drain::cli
