#include "gestalt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gestalt/svgplot.hpp"

namespace gestalt::exper {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError("unknown config key '" + where + key + "'");
    }
}

void apply_model_json(vae::ModelConfig& m, const json& j) {
    reject_unknown(j, {"popcode", "posture_neurons", "direction_neurons", "magnitude_neurons",
                       "zeta_p", "zeta_d", "zeta_m", "posture_range_scale",
                       "magnitude_range_scale", "hidden", "latent", "lr_p", "lr_d", "lr_m",
                       "epochs", "kl_weight", "loss"},
                   "model.");
    m.popcode = j.value("popcode", m.popcode);
    m.posture_neurons = j.value("posture_neurons", m.posture_neurons);
    m.direction_neurons = j.value("direction_neurons", m.direction_neurons);
    m.magnitude_neurons = j.value("magnitude_neurons", m.magnitude_neurons);
    m.zeta_p = j.value("zeta_p", m.zeta_p);
    m.zeta_d = j.value("zeta_d", m.zeta_d);
    m.zeta_m = j.value("zeta_m", m.zeta_m);
    m.posture_range_scale = j.value("posture_range_scale", m.posture_range_scale);
    m.magnitude_range_scale = j.value("magnitude_range_scale", m.magnitude_range_scale);
    for (auto* c : {&m.posture_cfg, &m.direction_cfg, &m.magnitude_cfg}) {
        c->hidden = j.value("hidden", c->hidden);
        c->latent = j.value("latent", c->latent);
        c->epochs = j.value("epochs", c->epochs);
        c->kl_weight = j.value("kl_weight", c->kl_weight);
        if (j.contains("loss"))
            c->loss = j.at("loss") == "mse" ? vae::LossKind::mse : vae::LossKind::bce;
    }
    m.posture_cfg.lr = j.value("lr_p", m.posture_cfg.lr);
    m.direction_cfg.lr = j.value("lr_d", m.direction_cfg.lr);
    m.magnitude_cfg.lr = j.value("lr_m", m.magnitude_cfg.lr);
}

json model_to_json(const vae::ModelConfig& m) {
    return json{{"popcode", m.popcode},
                {"posture_neurons", m.posture_neurons},
                {"direction_neurons", m.direction_neurons},
                {"magnitude_neurons", m.magnitude_neurons},
                {"zeta_p", m.zeta_p},
                {"zeta_d", m.zeta_d},
                {"zeta_m", m.zeta_m},
                {"posture_range_scale", m.posture_range_scale},
                {"magnitude_range_scale", m.magnitude_range_scale},
                {"hidden", m.posture_cfg.hidden},
                {"latent", m.posture_cfg.latent},
                {"lr_p", m.posture_cfg.lr},
                {"lr_d", m.direction_cfg.lr},
                {"lr_m", m.magnitude_cfg.lr},
                {"epochs", m.posture_cfg.epochs},
                {"kl_weight", m.posture_cfg.kl_weight},
                {"loss", m.posture_cfg.loss == vae::LossKind::bce ? "bce" : "mse"}};
}

std::string model_file(const std::string& dir, std::uint64_t seed) {
    return dir + "/model_seed" + std::to_string(seed) + ".gvae";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << text;
}

// Parallel fan-out over seeds; rethrows the first failure.
void for_each_seed(const std::vector<std::uint64_t>& seeds,
                   const std::function<void(std::uint64_t)>& body) {
    std::vector<std::thread> pool;
    std::mutex mu;
    std::exception_ptr err;
    const std::size_t workers =
        std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::uint64_t seed;
            {
                std::lock_guard lock(mu);
                if (next >= seeds.size() || err) return;
                seed = seeds[next++];
            }
            try {
                body(seed);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

void write_binding_csv(const binding::BindingState& state, const std::string& path) {
    std::ofstream os(path);
    const auto w = state.weights();
    char buf[32];
    for (std::size_t i = 0; i < state.n; ++i) {
        for (std::size_t j = 0; j < state.m; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", w[i * state.m + j]);
            os << (j ? "," : "") << buf;
        }
        os << "\n";
    }
}

struct SeriesStat {
    std::vector<double> mean, stdev;
    std::size_t runs = 0;
};

SeriesStat aggregate(const std::vector<std::vector<double>>& runs) {
    SeriesStat out;
    out.runs = runs.size();
    if (runs.empty()) return out;
    const std::size_t n = runs[0].size();
    out.mean.assign(n, 0.0);
    out.stdev.assign(n, 0.0);
    for (const auto& r : runs) {
        if (r.size() != n) throw std::runtime_error("report: runs have differing lengths");
        for (std::size_t i = 0; i < n; ++i) out.mean[i] += r[i];
    }
    for (auto& m : out.mean) m /= static_cast<double>(runs.size());
    for (const auto& r : runs)
        for (std::size_t i = 0; i < n; ++i) {
            const double d = r[i] - out.mean[i];
            out.stdev[i] += d * d;
        }
    for (auto& s : out.stdev)
        s = runs.size() > 1 ? std::sqrt(s / static_cast<double>(runs.size() - 1)) : 0.0;
    return out;
}

// Reads one column of a metrics csv (by header name).
std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("report: cannot open " + path);
    std::string line;
    std::getline(is, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw std::runtime_error("report: column '" + column + "' missing in " + path);
    const std::size_t idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c++ == idx) out.push_back(std::stod(cell));
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"pendulum", "pendulum-raw", "walker-pop", "walker-pop-wide", "walker-raw",
            "walker-exp1", "walker-exp2", "walker-exp3", "pendulum-exp4",
            "perspective-default"};
}

ExperimentConfig make_preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.preset = name;
    auto pendulum_model = [&] {
        cfg.data_source = "pendulum";
        cfg.model.posture_neurons = 16;
        cfg.model.direction_neurons = 8;
        cfg.model.magnitude_neurons = 4;
        // 1e-3 stretches convergence across the epoch budget and ends at a
        // lower floor than 1e-2, which plateaus within the first epoch.
        cfg.model.posture_cfg.lr = 1e-3;
        cfg.model.direction_cfg.lr = 1e-3;
        cfg.model.magnitude_cfg.lr = 1e-3;
    };
    auto walker_pop_model = [&] {
        cfg.data_source = "walker";
        cfg.model.posture_cfg.lr = 1e-3;
        cfg.model.direction_cfg.lr = 8e-4;
        cfg.model.magnitude_cfg.lr = 5e-4;
    };
    auto walker_raw_model = [&] {
        cfg.data_source = "walker";
        cfg.model.popcode = false;
        cfg.model.posture_cfg.lr = 1e-3;
        cfg.model.direction_cfg.lr = 2e-5;
        cfg.model.magnitude_cfg.lr = 8e-4;
        for (auto* c : {&cfg.model.posture_cfg, &cfg.model.direction_cfg,
                        &cfg.model.magnitude_cfg}) {
            c->hidden = 25;
            c->latent = 10;
        }
    };
    if (name == "pendulum") {
        cfg.kind = "train";
        pendulum_model();
    } else if (name == "pendulum-raw") {
        cfg.kind = "train";
        pendulum_model();
        cfg.model.popcode = false;
        for (auto* c : {&cfg.model.posture_cfg, &cfg.model.direction_cfg,
                        &cfg.model.magnitude_cfg}) {
            c->hidden = 25;
            c->latent = 10;
        }
    } else if (name == "walker-pop") {
        cfg.kind = "train";
        walker_pop_model();
    } else if (name == "walker-pop-wide") {
        // Companion model for perspective experiments. The pose loss surface
        // must stay informative for stimuli rotated and translated well
        // outside the canonical gait volume, so the posture code is widened
        // and coarsened: a 3x3x3 lattice with maximal tuning width over a 9x
        // bounding box keeps a smooth, in-support gradient all the way from
        // the undisturbed pose to the recovery target. A finer or narrower
        // code leaves the translation bias stranded on a zero-gradient
        // plateau once the disturbed stimulus falls outside lattice support.
        cfg.kind = "train";
        walker_pop_model();
        cfg.model.posture_neurons = 27;
        cfg.model.zeta_p = 1.0;
        cfg.model.posture_range_scale = 9.0;
    } else if (name == "walker-raw") {
        cfg.kind = "train";
        walker_raw_model();
    } else if (name == "walker-exp1") {
        // Walker binding runs use a halved rate and a warmer initial bias:
        // the 15-slot posture gestalt produces large summed gradients, and
        // starting nearer the logistic's responsive range keeps the early
        // adaptation from stalling at near-zero weights.
        cfg.kind = "bind";
        walker_raw_model();
        cfg.hyper = {.eta_f = 0.5, .gamma_f = 0.9,
                     .beta_p = 5.0, .beta_d = 1.0, .beta_m = 0.125};
        cfg.binding_init_bias = -1.0;
    } else if (name == "walker-exp2") {
        cfg.kind = "bind";
        walker_pop_model();
        cfg.hyper = {.eta_f = 0.5, .gamma_f = 0.9,
                     .beta_p = 6.0, .beta_d = 0.0, .beta_m = 0.0};
        cfg.binding_init_bias = -1.0;
    } else if (name == "walker-exp3") {
        cfg.kind = "bind";
        walker_pop_model();
        cfg.hyper = {.eta_f = 0.5, .gamma_f = 0.9,
                     .beta_p = 8.0, .beta_d = 2.0, .beta_m = 0.125};
        cfg.binding_init_bias = -1.0;
    } else if (name == "pendulum-exp4") {
        cfg.kind = "bind";
        pendulum_model();
        cfg.hyper = {.eta_f = 0.1, .gamma_f = 0.9,
                     .beta_p = 1.0, .beta_d = 8.0, .beta_m = 2.0};
        cfg.binding_init_bias = -1.0;
    } else if (name == "perspective-default") {
        cfg.kind = "perspective";
        walker_pop_model();
        // Match the walker-pop-wide lattice (see above): perspective trials
        // start far from the canonical frame and need in-support gradients.
        cfg.model.posture_neurons = 27;
        cfg.model.zeta_p = 1.0;
        cfg.model.posture_range_scale = 9.0;
        // A small posture weight keeps the rotation channel driven by the
        // translation-invariant direction loss while that estimate is still
        // wrong; the translation rate is raised to compensate, since the
        // translation gradient flows only through the posture loss.
        cfg.hyper = {.eta_r = 1e-2, .gamma_r = 0.9, .eta_b = 3.2e-2, .gamma_b = 0.9,
                     .beta_p = 0.5, .beta_d = 3.0, .beta_m = 0.125};
        cfg.disturbance.rotation_deg = {25.0, 35.0, 45.0};
        cfg.disturbance.translation = {-2.0, 2.5, -4.0};
        cfg.steps = 3000;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return cfg;
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = make_preset(j.at("preset"));
    reject_unknown(j, {"kind", "preset", "data", "model", "hyper", "disturbance", "steps",
                       "seeds", "models_dir", "out_dir", "binding_init_bias"},
                   "");
    cfg.kind = j.value("kind", cfg.kind);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.binding_init_bias = j.value("binding_init_bias", cfg.binding_init_bias);
    cfg.models_dir = j.value("models_dir", cfg.models_dir);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("data")) {
        const auto& d = j.at("data");
        reject_unknown(d, {"source", "pendulum", "walker"}, "data.");
        cfg.data_source = d.value("source", cfg.data_source);
        if (d.contains("pendulum")) {
            const auto& p = d.at("pendulum");
            reject_unknown(p, {"l1", "l2", "m1", "m2", "gravity", "theta1", "theta2", "omega1",
                               "omega2", "dt", "steps"},
                           "data.pendulum.");
            auto& pp = cfg.pendulum;
            pp.l1 = p.value("l1", pp.l1);
            pp.l2 = p.value("l2", pp.l2);
            pp.m1 = p.value("m1", pp.m1);
            pp.m2 = p.value("m2", pp.m2);
            pp.gravity = p.value("gravity", pp.gravity);
            pp.theta1 = p.value("theta1", pp.theta1);
            pp.theta2 = p.value("theta2", pp.theta2);
            pp.omega1 = p.value("omega1", pp.omega1);
            pp.omega2 = p.value("omega2", pp.omega2);
            pp.dt = p.value("dt", pp.dt);
            pp.steps = p.value("steps", pp.steps);
        }
        if (d.contains("walker")) {
            const auto& w = d.at("walker");
            reject_unknown(w, {"period", "frames", "dt", "scale", "seed"}, "data.walker.");
            auto& wp = cfg.walker;
            wp.period = w.value("period", wp.period);
            wp.frames = w.value("frames", wp.frames);
            wp.dt = w.value("dt", wp.dt);
            wp.scale = w.value("scale", wp.scale);
            wp.seed = w.value("seed", wp.seed);
        }
    }
    if (j.contains("model")) apply_model_json(cfg.model, j.at("model"));
    if (j.contains("hyper")) {
        const auto& h = j.at("hyper");
        reject_unknown(h, {"eta_f", "gamma_f", "eta_r", "gamma_r", "eta_b", "gamma_b",
                           "beta_p", "beta_d", "beta_m", "loss"},
                       "hyper.");
        if (h.contains("loss")) {
            const std::string k = h.at("loss");
            cfg.hyper.loss = k == "bce" ? vae::LossKind::bce
                                        : (k == "mse" ? vae::LossKind::mse : vae::LossKind::sse);
        }
        cfg.hyper.eta_f = h.value("eta_f", cfg.hyper.eta_f);
        cfg.hyper.gamma_f = h.value("gamma_f", cfg.hyper.gamma_f);
        cfg.hyper.eta_r = h.value("eta_r", cfg.hyper.eta_r);
        cfg.hyper.gamma_r = h.value("gamma_r", cfg.hyper.gamma_r);
        cfg.hyper.eta_b = h.value("eta_b", cfg.hyper.eta_b);
        cfg.hyper.gamma_b = h.value("gamma_b", cfg.hyper.gamma_b);
        cfg.hyper.beta_p = h.value("beta_p", cfg.hyper.beta_p);
        cfg.hyper.beta_d = h.value("beta_d", cfg.hyper.beta_d);
        cfg.hyper.beta_m = h.value("beta_m", cfg.hyper.beta_m);
    }
    if (j.contains("disturbance")) {
        const auto& d = j.at("disturbance");
        reject_unknown(d, {"rx", "ry", "rz", "bx", "by", "bz"}, "disturbance.");
        cfg.disturbance.rotation_deg = {d.value("rx", cfg.disturbance.rotation_deg[0]),
                                        d.value("ry", cfg.disturbance.rotation_deg[1]),
                                        d.value("rz", cfg.disturbance.rotation_deg[2])};
        cfg.disturbance.translation = {d.value("bx", cfg.disturbance.translation[0]),
                                       d.value("by", cfg.disturbance.translation[1]),
                                       d.value("bz", cfg.disturbance.translation[2])};
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j{
        {"kind", cfg.kind},
        {"preset", cfg.preset},
        {"data",
         {{"source", cfg.data_source},
          {"pendulum",
           {{"l1", cfg.pendulum.l1}, {"l2", cfg.pendulum.l2}, {"m1", cfg.pendulum.m1},
            {"m2", cfg.pendulum.m2}, {"gravity", cfg.pendulum.gravity},
            {"theta1", cfg.pendulum.theta1}, {"theta2", cfg.pendulum.theta2},
            {"omega1", cfg.pendulum.omega1}, {"omega2", cfg.pendulum.omega2},
            {"dt", cfg.pendulum.dt}, {"steps", cfg.pendulum.steps}}},
          {"walker",
           {{"period", cfg.walker.period}, {"frames", cfg.walker.frames},
            {"dt", cfg.walker.dt}, {"scale", cfg.walker.scale}, {"seed", cfg.walker.seed}}}}},
        {"model", model_to_json(cfg.model)},
        {"hyper",
         {{"eta_f", cfg.hyper.eta_f}, {"gamma_f", cfg.hyper.gamma_f},
          {"eta_r", cfg.hyper.eta_r}, {"gamma_r", cfg.hyper.gamma_r},
          {"eta_b", cfg.hyper.eta_b}, {"gamma_b", cfg.hyper.gamma_b},
          {"beta_p", cfg.hyper.beta_p}, {"beta_d", cfg.hyper.beta_d},
          {"beta_m", cfg.hyper.beta_m},
          {"loss", cfg.hyper.loss == vae::LossKind::bce
                       ? "bce"
                       : (cfg.hyper.loss == vae::LossKind::mse ? "mse" : "sse")}}},
        {"disturbance",
         {{"rx", cfg.disturbance.rotation_deg[0]}, {"ry", cfg.disturbance.rotation_deg[1]},
          {"rz", cfg.disturbance.rotation_deg[2]}, {"bx", cfg.disturbance.translation[0]},
          {"by", cfg.disturbance.translation[1]}, {"bz", cfg.disturbance.translation[2]}}},
        {"steps", cfg.steps},
        {"seeds", cfg.seeds},
        {"models_dir", cfg.models_dir},
        {"out_dir", cfg.out_dir},
        {"binding_init_bias", cfg.binding_init_bias},
    };
    return j.dump(2);
}

data::FeatureSequence load_data(const ExperimentConfig& cfg) {
    if (cfg.data_source == "pendulum") return data::simulate_pendulum(cfg.pendulum);
    if (cfg.data_source == "walker") return data::generate_walker(cfg.walker);
    if (cfg.data_source.ends_with(".csv")) return data::load_csv(cfg.data_source);
    throw ConfigError("data.source must be 'pendulum', 'walker' or a .csv path, got '" +
                      cfg.data_source + "'");
}

int run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind != "train" && cfg.kind != "bind" && cfg.kind != "perspective" &&
        cfg.kind != "joint")
        throw ConfigError("kind must be train|bind|perspective|joint, got '" + cfg.kind + "'");
    if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
    if (cfg.kind != "train" && cfg.models_dir.empty())
        throw ConfigError("models_dir is required for inference experiments");
    fs::create_directories(cfg.out_dir);
    const auto seq = load_data(cfg);
    {
        json manifest = json::parse(config_to_json(cfg));
        manifest["data_hash"] = vae::sequence_hash(seq);
        write_text(cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    }
    try {
        if (cfg.kind == "train") {
            for_each_seed(cfg.seeds, [&](std::uint64_t seed) {
                vae::ModelConfig mc = cfg.model;
                mc.seed = seed;
                auto model = vae::train(mc, seq);
                vae::save_model(model, model_file(cfg.out_dir, seed));
                std::ofstream cs(cfg.out_dir + "/training_curve_seed" + std::to_string(seed) +
                                 ".csv");
                cs << "epoch,loss_p,loss_d,loss_m\n";
                for (std::size_t e = 0; e < model.curves.posture.size(); ++e)
                    cs << e << "," << model.curves.posture[e] << "," << model.curves.direction[e]
                       << "," << model.curves.magnitude[e] << "\n";
            });
            // One representative curve plot per run directory.
            auto model = vae::load_model(model_file(cfg.out_dir, cfg.seeds.front()));
            plot::line_chart(cfg.out_dir + "/training_curves.svg", "training reconstruction loss",
                             {{"posture", model.curves.posture, {}},
                              {"direction", model.curves.direction, {}},
                              {"magnitude", model.curves.magnitude, {}}},
                             "epoch", "loss");
        } else {
            for_each_seed(cfg.seeds, [&](std::uint64_t seed) {
                auto model = vae::load_model(model_file(cfg.models_dir, seed));
                infer::InferenceRun run;
                if (cfg.kind == "bind")
                    run = infer::infer_binding(model, seq, cfg.hyper, cfg.steps,
                                               cfg.binding_init_bias);
                else if (cfg.kind == "perspective")
                    run = infer::infer_perspective(model, seq, cfg.disturbance, cfg.hyper,
                                                   cfg.steps);
                else
                    run = infer::infer_joint(model, seq, cfg.disturbance, cfg.hyper, cfg.steps,
                                             cfg.binding_init_bias);
                const std::string tag = std::to_string(seed);
                infer::save_metrics_csv(run, cfg.out_dir + "/metrics_seed" + tag + ".csv");
                write_binding_csv(run.binding, cfg.out_dir + "/binding_seed" + tag + ".csv");
                plot::heatmap(cfg.out_dir + "/binding_seed" + tag + ".svg", "binding matrix",
                              run.binding.weights(), run.binding.n, run.binding.m);
            });
            // Curve plot over seeds for the kind's headline metric.
            std::vector<plot::Series> series;
            const std::string column = cfg.kind == "bind" ? "fbe" : "od_deg";
            for (auto seed : cfg.seeds)
                series.push_back({"seed " + std::to_string(seed),
                                  read_csv_column(cfg.out_dir + "/metrics_seed" +
                                                      std::to_string(seed) + ".csv",
                                                  column),
                                  {}});
            plot::line_chart(cfg.out_dir + "/" + column + ".svg", column, series, "step", column);
        }
    } catch (const std::exception& e) {
        write_text(cfg.out_dir + "/FAILED.txt", std::string(e.what()) + "\n");
        std::fprintf(stderr, "experiment failed: %s\n", e.what());
        return 1;
    }
    return 0;
}

int run_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    if (run_dirs.empty()) throw ConfigError("report: need at least one run directory");
    fs::create_directories(out_dir);
    std::string kind;
    std::vector<plot::Series> chart;
    std::ofstream summary(out_dir + "/report.csv");
    summary << "run,metric,step_first,step_last,mean_first,mean_last,std_last,runs\n";
    for (const auto& dir : run_dirs) {
        std::ifstream ms(dir + "/manifest.json");
        if (!ms) throw std::runtime_error("report: missing manifest in " + dir);
        json manifest = json::parse(ms);
        const std::string this_kind = manifest.at("kind");
        if (kind.empty()) kind = this_kind;
        else if (kind != this_kind)
            throw ConfigError("report: mixing incompatible run kinds '" + kind + "' and '" +
                              this_kind + "'");
        const auto seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();
        if (this_kind == "train") {
            for (const std::string metric : {"loss_p", "loss_d", "loss_m"}) {
                std::vector<std::vector<double>> runs;
                for (auto s : seeds)
                    runs.push_back(read_csv_column(
                        dir + "/training_curve_seed" + std::to_string(s) + ".csv", metric));
                auto stat = aggregate(runs);
                summary << fs::path(dir).filename().string() << "," << metric << ",0,"
                        << stat.mean.size() - 1 << "," << stat.mean.front() << ","
                        << stat.mean.back() << "," << stat.stdev.back() << "," << stat.runs
                        << "\n";
                chart.push_back({fs::path(dir).filename().string() + ":" + metric, stat.mean,
                                 stat.stdev});
            }
        } else {
            const std::vector<std::string> metrics =
                this_kind == "bind" ? std::vector<std::string>{"fbe"}
                                    : std::vector<std::string>{"od_deg", "td_cm", "fbe"};
            for (const auto& metric : metrics) {
                std::vector<std::vector<double>> runs;
                for (auto s : seeds)
                    runs.push_back(read_csv_column(
                        dir + "/metrics_seed" + std::to_string(s) + ".csv", metric));
                auto stat = aggregate(runs);
                summary << fs::path(dir).filename().string() << "," << metric << ",1,"
                        << stat.mean.size() << "," << stat.mean.front() << ","
                        << stat.mean.back() << "," << stat.stdev.back() << "," << stat.runs
                        << "\n";
                chart.push_back({fs::path(dir).filename().string() + ":" + metric, stat.mean,
                                 stat.stdev});
            }
        }
    }
    plot::line_chart(out_dir + "/report.svg", "aggregated metrics (mean ± std)", chart, "step",
                     "");
    return 0;
}

}  // namespace gestalt::exper
