#include "gestalt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gestalt::infer {

namespace {

void check_orthonormal(const perspective::Mat3& r, const char* which) {
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 3; ++k) acc += r[k * 3 + i] * r[k * 3 + j];
            const double expect = i == j ? 1.0 : 0.0;
            if (std::abs(acc - expect) > 1e-6)
                throw std::invalid_argument(std::string("od: ") + which +
                                            " rotation is not orthonormal");
        }
    }
}

perspective::Mat3 pose_rotation3(const perspective::Pose& pose) {
    return perspective::rotation_from_euler(pose);
}

MetricRow metrics_of(const InferenceRun& run, std::size_t step_idx) {
    MetricRow row;
    row.step = step_idx;
    row.fbe = binding::fbe(run.binding, run.target);
    row.od_deg = od(pose_rotation3(run.pose), run.rotation_target);
    const std::size_t d = run.pose.dim;
    row.td = td(std::span(run.pose.translation).first(d),
                std::span(run.translation_target).first(d));
    row.td_cm = row.td * 100.0;
    row.angles = run.pose.angles;
    row.translation = run.pose.translation;
    return row;
}

}  // namespace

double od(const perspective::Mat3& r_model, const perspective::Mat3& r_data,
          bool literal_prefactor) {
    check_orthonormal(r_model, "model");
    check_orthonormal(r_data, "data");
    double tr = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) tr += r_model[k * 3 + i] * r_data[k * 3 + i];
    const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
    const double prefactor = literal_prefactor ? 180.0 / (2.0 * M_PI) : 180.0 / M_PI;
    return prefactor * std::acos(c);
}

double td(std::span<const double> b_model, std::span<const double> b_data) {
    if (b_model.size() != b_data.size())
        throw std::invalid_argument("td: dimensionality mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < b_model.size(); ++k) {
        const double d = b_data[k] - b_model[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

InferenceRun make_run(const vae::GestaltModel& model, const Hyper& hyper, const Groups& groups,
                      const data::DisturbanceSpec& applied, std::size_t n_observed,
                      double binding_init_bias) {
    InferenceRun run;
    run.model = &model;
    run.hyper = hyper;
    run.groups = groups;
    run.binding = binding::init_binding(binding::InitMode::inference, n_observed,
                                        model.cfg.slots, binding_init_bias);
    run.pose.dim = model.cfg.dim;
    // Metric targets: the pose that undoes the applied disturbance,
    // P = R_target * X_disturbed + b_target, i.e. R_d^T and -R_d^T b_d.
    const double deg = M_PI / 180.0;
    const auto r_d = model.cfg.dim == 2
                         ? perspective::rotation_from_euler(0, 0, applied.rotation_deg[2] * deg)
                         : perspective::rotation_from_euler(applied.rotation_deg[0] * deg,
                                                            applied.rotation_deg[1] * deg,
                                                            applied.rotation_deg[2] * deg);
    run.rotation_target = perspective::transpose(r_d);
    const auto bt = perspective::apply(run.rotation_target, applied.translation);
    for (std::size_t k = 0; k < 3; ++k) run.translation_target[k] = -bt[k];
    run.initial = metrics_of(run, 0);
    return run;
}

void step(InferenceRun& run, std::span<const double> x_t, std::span<const double> x_prev) {
    const auto& model = *run.model;
    const std::size_t d = model.cfg.dim;
    const std::size_t n = run.binding.n;
    if (x_t.size() != n * d || x_prev.size() != x_t.size())
        throw std::invalid_argument("infer::step: frame size mismatch");
    std::vector<double> vel(x_t.size());
    for (std::size_t k = 0; k < vel.size(); ++k) vel[k] = x_t[k] - x_prev[k];

    ad::Graph g;
    const std::size_t na = run.pose.num_angles();
    std::vector<double> angle_vals(na);
    for (std::size_t k = 0; k < na; ++k)
        angle_vals[k] = d == 2 ? run.pose.angles[2] : run.pose.angles[k];
    auto angles = run.groups.rotation ? g.variable(angle_vals, {na}, "alpha")
                                      : g.constant(angle_vals, {na}, "alpha");
    std::vector<double> trans_vals(run.pose.translation.begin(),
                                   run.pose.translation.begin() + d);
    auto trans = run.groups.translation ? g.variable(trans_vals, {d}, "b")
                                        : g.constant(trans_vals, {d}, "b");
    auto bias = run.groups.binding
                    ? g.variable(run.binding.bias, {n, model.cfg.slots}, "w_bias")
                    : g.constant(run.binding.bias, {n, model.cfg.slots}, "w_bias");

    auto rotation = perspective::rotation_node(g, angles, d);
    auto submodal = perspective::submodal_nodes(g, x_t, vel, n, d, rotation, trans);
    auto weights = binding::weights_node(g, bias);
    auto gestalt = vae::gestalt_nodes(g, model, submodal, weights, n);
    auto losses = vae::loss_nodes(g, model, gestalt, run.hyper.beta_p, run.hyper.beta_d,
                                  run.hyper.beta_m, run.hyper.loss);
    if (!std::isfinite(losses.combined->scalar()))
        throw std::runtime_error("infer::step: non-finite loss at step " +
                                 std::to_string(run.steps_done + 1) +
                                 " (L_p=" + std::to_string(losses.loss_p->scalar()) +
                                 ", L_d=" + std::to_string(losses.loss_d->scalar()) +
                                 ", L_m=" + std::to_string(losses.loss_m->scalar()) + ")");
    const bool any_group = run.groups.binding || run.groups.rotation || run.groups.translation;
    if (any_group) {
        g.backward(losses.combined);
        if (run.groups.binding)
            binding::adapt_binding(run.binding, bias->grad, run.hyper.eta_f, run.hyper.gamma_f);
        if (run.groups.rotation) {
            if (d == 2) {
                std::array<double, 1> a{run.pose.angles[2]};
                run.pose.angle_hist.apply(a, angles->grad, run.hyper.eta_r, run.hyper.gamma_r);
                run.pose.angles[2] = a[0];
            } else {
                run.pose.angle_hist.apply(run.pose.angles, angles->grad, run.hyper.eta_r,
                                          run.hyper.gamma_r);
            }
        }
        if (run.groups.translation) {
            std::span<double> bspan(run.pose.translation.data(), d);
            run.pose.translation_hist.apply(bspan, trans->grad, run.hyper.eta_b,
                                            run.hyper.gamma_b);
        }
    }
    run.steps_done += 1;
    MetricRow row = metrics_of(run, run.steps_done);
    row.loss = losses.combined->scalar();
    row.loss_p = losses.loss_p->scalar();
    row.loss_d = losses.loss_d->scalar();
    row.loss_m = losses.loss_m->scalar();
    run.log.push_back(row);
}

void run_sequence(InferenceRun& run, const data::FeatureSequence& seq, std::size_t steps) {
    seq.validate();
    const std::size_t transitions = seq.num_frames() - 1;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t t = 1 + (s % transitions);
        step(run, seq.frames[t], seq.frames[t - 1]);
    }
}

InferenceRun infer_binding(const vae::GestaltModel& model, const data::FeatureSequence& seq,
                           const Hyper& hyper, std::size_t steps, double binding_init_bias) {
    Groups groups;
    groups.binding = true;
    auto run = make_run(model, hyper, groups, {}, seq.num_features, binding_init_bias);
    run_sequence(run, seq, steps);
    return run;
}

InferenceRun infer_perspective(const vae::GestaltModel& model,
                               const data::FeatureSequence& canonical,
                               const data::DisturbanceSpec& disturbance, const Hyper& hyper,
                               std::size_t steps) {
    Groups groups;
    groups.rotation = true;
    groups.translation = true;
    auto run = make_run(model, hyper, groups, disturbance, canonical.num_features);
    run.binding = binding::init_binding(binding::InitMode::training, canonical.num_features,
                                        model.cfg.slots);
    run.initial = metrics_of(run, 0);
    run_sequence(run, data::apply_disturbance(canonical, disturbance), steps);
    return run;
}

InferenceRun infer_joint(const vae::GestaltModel& model, const data::FeatureSequence& canonical,
                         const data::DisturbanceSpec& disturbance, const Hyper& hyper,
                         std::size_t steps, double binding_init_bias) {
    Groups groups;
    groups.binding = true;
    groups.rotation = true;
    groups.translation = true;
    auto run = make_run(model, hyper, groups, disturbance, canonical.num_features,
                        binding_init_bias);
    run_sequence(run, data::apply_disturbance(canonical, disturbance), steps);
    return run;
}

void save_metrics_csv(const InferenceRun& run, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_metrics_csv: cannot open " + path);
    os << "step,loss,loss_p,loss_d,loss_m,fbe,od_deg,td,td_cm,"
          "alpha_x,alpha_y,alpha_z,b_x,b_y,b_z\n";
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << "," << buf;
    };
    for (const auto& row : run.log) {
        os << row.step;
        emit(row.loss);
        emit(row.loss_p);
        emit(row.loss_d);
        emit(row.loss_m);
        emit(row.fbe);
        emit(row.od_deg);
        emit(row.td);
        emit(row.td_cm);
        for (double a : row.angles) emit(a);
        for (double b : row.translation) emit(b);
        os << "\n";
    }
}

}  // namespace gestalt::infer
