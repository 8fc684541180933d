#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gestalt/datagen.hpp"
#include "gestalt/experiment.hpp"

// gestalt: train cyclic-motion models and run binding / perspective inference.
// Exit codes: 0 success, 1 experiment failure, 2 bad usage or configuration.

namespace {

using gestalt::exper::ExperimentConfig;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw gestalt::exper::ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct CommonOpts {
    std::string config;
    std::string preset;
    std::string out_dir;
    std::string models_dir;
    std::string data_source;
    std::vector<std::uint64_t> seeds;
    std::size_t steps = 0;
    bool has_steps = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool inference) {
    cmd->add_option("--config", o.config, "JSON config file");
    cmd->add_option("--preset", o.preset,
                    "named preset (see --help-presets on the top-level command)");
    cmd->add_option("--out", o.out_dir, "output directory for run artifacts");
    cmd->add_option("--data", o.data_source, "data source: pendulum | walker | <path>.csv");
    cmd->add_option("--seeds", o.seeds, "seeds to fan out over");
    if (inference) {
        cmd->add_option("--models", o.models_dir, "directory of a prior train run");
        cmd->add_option("--steps", o.steps, "adaptation steps")
            ->each([&](const std::string&) { o.has_steps = true; });
    }
}

ExperimentConfig resolve(const CommonOpts& o, const std::string& kind) {
    ExperimentConfig cfg;
    if (!o.config.empty())
        cfg = gestalt::exper::config_from_json(read_file(o.config));
    else if (!o.preset.empty())
        cfg = gestalt::exper::make_preset(o.preset);
    else
        throw gestalt::exper::ConfigError("need --config or --preset");
    if (!o.preset.empty() && !o.config.empty())
        throw gestalt::exper::ConfigError("--config and --preset are mutually exclusive");
    cfg.kind = kind;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (!o.models_dir.empty()) cfg.models_dir = o.models_dir;
    if (!o.data_source.empty()) cfg.data_source = o.data_source;
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (o.has_steps) cfg.steps = o.steps;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gestalt motion models: training, feature binding, perspective taking"};
    app.require_subcommand(0, 1);

    bool list_presets = false;
    app.add_flag("--help-presets", list_presets, "list named presets and exit");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a motion sequence CSV");
    std::string gen_source = "walker", gen_out;
    gestalt::data::PendulumParams pend;
    gestalt::data::WalkerParams walk;
    gen->add_option("--source", gen_source, "pendulum | walker")->check(CLI::IsMember({"pendulum", "walker"}));
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--steps", pend.steps, "pendulum: number of integration steps");
    gen->add_option("--dt", pend.dt, "pendulum: integration step (s)");
    gen->add_option("--theta1", pend.theta1, "pendulum: initial upper angle (rad)");
    gen->add_option("--theta2", pend.theta2, "pendulum: initial lower angle (rad)");
    gen->add_option("--frames", walk.frames, "walker: total frames");
    gen->add_option("--period", walk.period, "walker: gait cycle length in frames");

    CommonOpts train_o, bind_o, persp_o, joint_o;
    auto* train = app.add_subcommand("train", "train the three feature models");
    add_common(train, train_o, false);
    auto* bind = app.add_subcommand("bind", "solve feature binding on a trained model");
    add_common(bind, bind_o, true);
    auto* persp = app.add_subcommand("perspective", "infer a disturbed viewpoint");
    add_common(persp, persp_o, true);
    auto* joint = app.add_subcommand("joint", "binding and perspective together");
    add_common(joint, joint_o, true);

    auto* report = app.add_subcommand("report", "aggregate completed run directories");
    std::vector<std::string> report_runs;
    std::string report_out;
    report->add_option("--runs", report_runs, "run directories to aggregate")->required();
    report->add_option("--out", report_out, "report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_presets) {
        for (const auto& p : gestalt::exper::preset_names()) std::printf("%s\n", p.c_str());
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    }

    try {
        if (gen->parsed()) {
            auto seq = gen_source == "pendulum" ? gestalt::data::simulate_pendulum(pend)
                                                : gestalt::data::generate_walker(walk);
            gestalt::data::save_csv(seq, gen_out);
            return 0;
        }
        if (report->parsed()) return gestalt::exper::run_report(report_runs, report_out);
        ExperimentConfig cfg;
        if (train->parsed()) cfg = resolve(train_o, "train");
        else if (bind->parsed()) cfg = resolve(bind_o, "bind");
        else if (persp->parsed()) cfg = resolve(persp_o, "perspective");
        else cfg = resolve(joint_o, "joint");
        return gestalt::exper::run_experiment(cfg);
    } catch (const gestalt::exper::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
