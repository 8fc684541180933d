// Python bindings for the Gestalt motion-model library: data generation,
// model training/serialization, retrospective inference, and the experiment
// harness used by the command-line tool.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gestalt/experiment.hpp"

namespace py = pybind11;
using namespace gestalt;

namespace {

std::string loss_name(vae::LossKind k) {
    switch (k) {
        case vae::LossKind::bce: return "bce";
        case vae::LossKind::mse: return "mse";
        default: return "sse";
    }
}

vae::LossKind loss_kind(const std::string& name) {
    if (name == "bce") return vae::LossKind::bce;
    if (name == "mse") return vae::LossKind::mse;
    if (name == "sse") return vae::LossKind::sse;
    throw py::value_error("loss must be one of 'bce', 'mse', 'sse', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_gestalt, m) {
    m.doc() = "Gestalt motion models: cyclic-motion VAEs with online "
              "binding and perspective inference";

    // ---- data ---------------------------------------------------------
    py::class_<data::FeatureSequence>(m, "FeatureSequence")
        .def(py::init<>())
        .def_readwrite("num_features", &data::FeatureSequence::num_features)
        .def_readwrite("dim", &data::FeatureSequence::dim)
        .def_readwrite("dt", &data::FeatureSequence::dt)
        .def_readwrite("labels", &data::FeatureSequence::labels)
        .def_readwrite("frames", &data::FeatureSequence::frames)
        .def("num_frames", &data::FeatureSequence::num_frames)
        .def("validate", &data::FeatureSequence::validate);

    py::class_<data::PendulumParams>(m, "PendulumParams")
        .def(py::init<>())
        .def_readwrite("l1", &data::PendulumParams::l1)
        .def_readwrite("l2", &data::PendulumParams::l2)
        .def_readwrite("m1", &data::PendulumParams::m1)
        .def_readwrite("m2", &data::PendulumParams::m2)
        .def_readwrite("gravity", &data::PendulumParams::gravity)
        .def_readwrite("theta1", &data::PendulumParams::theta1)
        .def_readwrite("theta2", &data::PendulumParams::theta2)
        .def_readwrite("omega1", &data::PendulumParams::omega1)
        .def_readwrite("omega2", &data::PendulumParams::omega2)
        .def_readwrite("dt", &data::PendulumParams::dt)
        .def_readwrite("steps", &data::PendulumParams::steps);

    py::class_<data::WalkerParams>(m, "WalkerParams")
        .def(py::init<>())
        .def_readwrite("period", &data::WalkerParams::period)
        .def_readwrite("frames", &data::WalkerParams::frames)
        .def_readwrite("dt", &data::WalkerParams::dt)
        .def_readwrite("scale", &data::WalkerParams::scale)
        .def_readwrite("seed", &data::WalkerParams::seed);

    py::class_<data::DisturbanceSpec>(m, "DisturbanceSpec")
        .def(py::init<>())
        .def_readwrite("rotation_deg", &data::DisturbanceSpec::rotation_deg)
        .def_readwrite("translation", &data::DisturbanceSpec::translation);

    m.def("simulate_pendulum", &data::simulate_pendulum, py::arg("params") = data::PendulumParams{});
    m.def("generate_walker", &data::generate_walker, py::arg("params") = data::WalkerParams{});
    m.def("apply_disturbance", &data::apply_disturbance, py::arg("seq"), py::arg("spec"));
    m.def("save_csv", &data::save_csv, py::arg("seq"), py::arg("path"));
    m.def("load_csv", &data::load_csv, py::arg("path"));

    // ---- model ----------------------------------------------------------
    py::class_<vae::VaeConfig>(m, "VaeConfig")
        .def(py::init<>())
        .def_readwrite("hidden", &vae::VaeConfig::hidden)
        .def_readwrite("latent", &vae::VaeConfig::latent)
        .def_readwrite("lr", &vae::VaeConfig::lr)
        .def_readwrite("epochs", &vae::VaeConfig::epochs)
        .def_readwrite("kl_weight", &vae::VaeConfig::kl_weight);

    py::class_<vae::ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("popcode", &vae::ModelConfig::popcode)
        .def_readwrite("slots", &vae::ModelConfig::slots)
        .def_readwrite("dim", &vae::ModelConfig::dim)
        .def_readwrite("posture_neurons", &vae::ModelConfig::posture_neurons)
        .def_readwrite("direction_neurons", &vae::ModelConfig::direction_neurons)
        .def_readwrite("magnitude_neurons", &vae::ModelConfig::magnitude_neurons)
        .def_readwrite("posture_range_scale", &vae::ModelConfig::posture_range_scale)
        .def_readwrite("magnitude_range_scale", &vae::ModelConfig::magnitude_range_scale)
        .def_readwrite("posture_cfg", &vae::ModelConfig::posture_cfg)
        .def_readwrite("direction_cfg", &vae::ModelConfig::direction_cfg)
        .def_readwrite("magnitude_cfg", &vae::ModelConfig::magnitude_cfg)
        .def_readwrite("seed", &vae::ModelConfig::seed);

    py::class_<vae::TrainingCurves>(m, "TrainingCurves")
        .def_readonly("posture", &vae::TrainingCurves::posture)
        .def_readonly("direction", &vae::TrainingCurves::direction)
        .def_readonly("magnitude", &vae::TrainingCurves::magnitude);

    py::class_<vae::GestaltModel>(m, "GestaltModel")
        .def_readonly("cfg", &vae::GestaltModel::cfg)
        .def_readonly("data_hash", &vae::GestaltModel::data_hash)
        .def_readonly("curves", &vae::GestaltModel::curves);

    m.def("train", &vae::train, py::arg("cfg"), py::arg("seq"),
          py::call_guard<py::gil_scoped_release>());
    m.def("save_model", &vae::save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &vae::load_model, py::arg("path"));
    m.def("sequence_hash", &vae::sequence_hash, py::arg("seq"));

    // ---- inference ------------------------------------------------------
    py::class_<binding::BindingState>(m, "BindingState")
        .def_readonly("n", &binding::BindingState::n)
        .def_readonly("m", &binding::BindingState::m)
        .def_readonly("bias", &binding::BindingState::bias)
        .def("weights", &binding::BindingState::weights);

    py::class_<infer::Hyper>(m, "Hyper")
        .def(py::init<>())
        .def_readwrite("eta_f", &infer::Hyper::eta_f)
        .def_readwrite("gamma_f", &infer::Hyper::gamma_f)
        .def_readwrite("eta_r", &infer::Hyper::eta_r)
        .def_readwrite("gamma_r", &infer::Hyper::gamma_r)
        .def_readwrite("eta_b", &infer::Hyper::eta_b)
        .def_readwrite("gamma_b", &infer::Hyper::gamma_b)
        .def_readwrite("beta_p", &infer::Hyper::beta_p)
        .def_readwrite("beta_d", &infer::Hyper::beta_d)
        .def_readwrite("beta_m", &infer::Hyper::beta_m)
        .def_property(
            "loss", [](const infer::Hyper& h) { return loss_name(h.loss); },
            [](infer::Hyper& h, const std::string& name) { h.loss = loss_kind(name); });

    py::class_<infer::MetricRow>(m, "MetricRow")
        .def_readonly("step", &infer::MetricRow::step)
        .def_readonly("loss", &infer::MetricRow::loss)
        .def_readonly("loss_p", &infer::MetricRow::loss_p)
        .def_readonly("loss_d", &infer::MetricRow::loss_d)
        .def_readonly("loss_m", &infer::MetricRow::loss_m)
        .def_readonly("fbe", &infer::MetricRow::fbe)
        .def_readonly("od_deg", &infer::MetricRow::od_deg)
        .def_readonly("td", &infer::MetricRow::td)
        .def_readonly("td_cm", &infer::MetricRow::td_cm)
        .def_readonly("angles", &infer::MetricRow::angles)
        .def_readonly("translation", &infer::MetricRow::translation);

    py::class_<infer::InferenceRun>(m, "InferenceRun")
        .def_readonly("binding", &infer::InferenceRun::binding)
        .def_readonly("initial", &infer::InferenceRun::initial)
        .def_readonly("log", &infer::InferenceRun::log)
        .def_readonly("steps_done", &infer::InferenceRun::steps_done);

    m.def("fbe",
          [](const binding::BindingState& s, const std::vector<std::size_t>& target) {
              return binding::fbe(s, target);
          },
          py::arg("state"), py::arg("target") = std::vector<std::size_t>{},
          "Feature binding error; an empty target means the diagonal assignment.");
    m.def("infer_binding", &infer::infer_binding, py::arg("model"), py::arg("seq"),
          py::arg("hyper") = infer::Hyper{}, py::arg("steps") = 1000,
          py::arg("binding_init_bias") = -5.0, py::call_guard<py::gil_scoped_release>());
    m.def("infer_perspective", &infer::infer_perspective, py::arg("model"), py::arg("canonical"),
          py::arg("disturbance") = data::DisturbanceSpec{}, py::arg("hyper") = infer::Hyper{},
          py::arg("steps") = 1000, py::call_guard<py::gil_scoped_release>());
    m.def("infer_joint", &infer::infer_joint, py::arg("model"), py::arg("canonical"),
          py::arg("disturbance") = data::DisturbanceSpec{}, py::arg("hyper") = infer::Hyper{},
          py::arg("steps") = 1000, py::arg("binding_init_bias") = -5.0,
          py::call_guard<py::gil_scoped_release>());
    m.def("save_metrics_csv", &infer::save_metrics_csv, py::arg("run"), py::arg("path"));

    // ---- experiment harness ----------------------------------------------
    py::register_exception<exper::ConfigError>(m, "ConfigError", PyExc_ValueError);
    m.def("preset_names", &exper::preset_names);
    m.def("run_experiment_json",
          [](const std::string& text) {
              return exper::run_experiment(exper::config_from_json(text));
          },
          py::arg("config_json"), py::call_guard<py::gil_scoped_release>(),
          "Parse a JSON experiment config (strict keys) and run it; returns the exit status.");
    m.def("preset_json",
          [](const std::string& name) { return exper::config_to_json(exper::make_preset(name)); },
          py::arg("name"), "Serialized configuration of a named preset.");
    m.def("run_report", &exper::run_report, py::arg("run_dirs"), py::arg("out_dir"),
          py::call_guard<py::gil_scoped_release>());
}
