#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestalt/datagen.hpp"
#include "gestalt/gestaltvae.hpp"
#include "gestalt/inference.hpp"

// Experiment harness behind the CLI: named presets, JSON configuration with
// strict key checking, seed fan-out, and artifact/report emission.

namespace gestalt::exper {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string kind;                    // train | bind | perspective | joint
    std::string preset;
    std::string data_source = "walker";  // pendulum | walker | <path>.csv
    data::PendulumParams pendulum;
    data::WalkerParams walker;
    vae::ModelConfig model;
    infer::Hyper hyper;
    data::DisturbanceSpec disturbance;
    double binding_init_bias = -5.0;
    std::size_t steps = 1000;
    std::vector<std::uint64_t> seeds{0};
    std::string models_dir;  // inference kinds: directory of a prior train run
    std::string out_dir;
};

// Named presets pinning the published hyperparameter tables:
// train: pendulum, pendulum-raw, walker-pop, walker-pop-wide, walker-raw
// bind: walker-exp1 (raw), walker-exp2, walker-exp3, pendulum-exp4
// perspective: perspective-default
ExperimentConfig make_preset(const std::string& name);
std::vector<std::string> preset_names();

// Strict parse: unknown keys are rejected with their JSON path.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// Generates or loads the configured sequence.
data::FeatureSequence load_data(const ExperimentConfig& cfg);

// Runs the experiment, writing a manifest plus per-seed artifacts into
// cfg.out_dir. Returns 0 on success, 1 when any seed run fails.
int run_experiment(const ExperimentConfig& cfg);

// Aggregates completed run directories (mean/std across seeds per step) into
// summary CSVs and charts. Mixing different experiment kinds is an error.
int run_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace gestalt::exper
