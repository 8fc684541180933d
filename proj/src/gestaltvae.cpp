#include "gestalt/gestaltvae.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace gestalt::vae {

using json = nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'V', 'A', 'E', '0', '0', '0', '1'};

std::vector<double> xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> w(rows * cols);
    for (auto& x : w) x = dist(rng);
    return w;
}

struct TensorSpec {
    const char* name;
    std::size_t rows, cols;  // cols == 0 marks a bias vector
};

std::vector<TensorSpec> tensor_specs(std::size_t in, std::size_t hid, std::size_t lat) {
    return {
        {"w1", hid, in}, {"b1", hid, 0}, {"wm", lat, hid}, {"bm", lat, 0},
        {"wl", lat, hid}, {"bl", lat, 0}, {"v1", hid, lat}, {"c1", hid, 0},
        {"v2", in, hid},  {"c2", in, 0},
    };
}

// Forward graph from a flat parameter buffer; leaf order matches flatten().
VaeNodes build_vae(ad::Graph& g, std::span<const double> flat, std::size_t in, std::size_t hid,
                   std::size_t lat, const ad::NodePtr& input, std::span<const double> noise,
                   bool trainable) {
    if (input->size() != in)
        throw std::invalid_argument("vae_forward: input length mismatch");
    VaeNodes out;
    std::size_t off = 0;
    for (const auto& spec : tensor_specs(in, hid, lat)) {
        const std::size_t n = spec.rows * std::max<std::size_t>(spec.cols, 1);
        std::vector<double> v(flat.begin() + off, flat.begin() + off + n);
        ad::Shape shape = spec.cols ? ad::Shape{spec.rows, spec.cols} : ad::Shape{spec.rows};
        out.params.push_back(trainable ? g.variable(std::move(v), shape, spec.name)
                                       : g.constant(std::move(v), shape, spec.name));
        off += n;
    }
    const auto& p = out.params;
    auto h = g.tanh_(g.affine(p[0], p[1], input));
    out.mean = g.affine(p[2], p[3], h);
    out.logvar = g.affine(p[4], p[5], h);
    ad::NodePtr z = noise.empty() ? out.mean : g.reparameterize(out.mean, out.logvar, noise);
    auto h2 = g.tanh_(g.affine(p[6], p[7], z));
    out.recon = g.logistic(g.affine(p[8], p[9], h2));
    return out;
}

ad::NodePtr recon_loss_node(ad::Graph& g, const ad::NodePtr& recon, const ad::NodePtr& target,
                            LossKind loss) {
    switch (loss) {
        case LossKind::bce: return g.binary_cross_entropy(recon, target, true);
        case LossKind::mse: return g.mean_squared_error(recon, target);
        default: return g.sum_squared_error(recon, target);
    }
}

// Affine [lo, hi] -> [0, 1] node per channel.
ad::NodePtr raw_norm_node(ad::Graph& g, const RawNorm& norm, const ad::NodePtr& x) {
    std::vector<double> lo = norm.lo, inv(norm.lo.size());
    for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / (norm.hi[k] - norm.lo[k]);
    auto lo_c = g.constant(std::move(lo), x->shape);
    auto inv_c = g.constant(std::move(inv), x->shape);
    return g.mul(g.sub(x, lo_c), inv_c);
}

std::vector<double> raw_norm_apply(const RawNorm& norm, std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = (x[k] - norm.lo[k]) / (norm.hi[k] - norm.lo[k]);
    return out;
}

double bce_plain(std::span<const double> p, std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
        acc += -t[i] * std::log(pi) - (1.0 - t[i]) * std::log(1.0 - pi);
    }
    return acc / static_cast<double>(p.size());
}

double mse_plain(std::span<const double> p, std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - t[i]) * (p[i] - t[i]);
    return acc / static_cast<double>(p.size());
}

}  // namespace

void VaeParams::init(std::size_t in, std::size_t hid, std::size_t lat, std::uint64_t seed) {
    input = in;
    hidden = hid;
    latent = lat;
    std::mt19937_64 rng(seed);
    w1 = xavier(hid, in, rng);
    b1.assign(hid, 0.0);
    wm = xavier(lat, hid, rng);
    bm.assign(lat, 0.0);
    wl = xavier(lat, hid, rng);
    bl.assign(lat, 0.0);
    v1 = xavier(hid, lat, rng);
    c1.assign(hid, 0.0);
    v2 = xavier(in, hid, rng);
    c2.assign(in, 0.0);
}

std::size_t VaeParams::param_count() const {
    return w1.size() + b1.size() + wm.size() + bm.size() + wl.size() + bl.size() + v1.size() +
           c1.size() + v2.size() + c2.size();
}

std::vector<double> VaeParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto* t : {&w1, &b1, &wm, &bm, &wl, &bl, &v1, &c1, &v2, &c2})
        flat.insert(flat.end(), t->begin(), t->end());
    return flat;
}

void VaeParams::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw std::invalid_argument("VaeParams::unflatten: size mismatch");
    std::size_t off = 0;
    for (auto* t : {&w1, &b1, &wm, &bm, &wl, &bl, &v1, &c1, &v2, &c2}) {
        std::copy(flat.begin() + off, flat.begin() + off + t->size(), t->begin());
        off += t->size();
    }
}

VaeNodes vae_forward_node(ad::Graph& g, const VaeParams& p, const ad::NodePtr& input,
                          std::span<const double> noise, bool trainable) {
    const auto flat = p.flatten();
    return build_vae(g, flat, p.input, p.hidden, p.latent, input, noise, trainable);
}

VaeOutput vae_forward(const VaeParams& p, std::span<const double> input) {
    ad::Graph g;
    auto x = g.constant(std::vector<double>(input.begin(), input.end()), {input.size()});
    auto nodes = vae_forward_node(g, p, x);
    return {nodes.recon->value, nodes.mean->value, nodes.logvar->value};
}

std::size_t GestaltModel::block_p() const {
    return cfg.popcode ? lat_p.count : cfg.dim;
}
std::size_t GestaltModel::block_d() const {
    return cfg.popcode ? lat_d.count : cfg.dim;
}
std::size_t GestaltModel::block_m() const { return cfg.popcode ? lat_m.count : 1; }

FeatureBlocks encode_blocks(ad::Graph& g, const GestaltModel& model,
                            const perspective::SubmodalNodes& submodal) {
    FeatureBlocks out;
    const std::size_t n = submodal.positions.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (model.cfg.popcode) {
            out.posture.push_back(popcode::encode_node(g, model.lat_p, submodal.positions[i], true));
            out.direction.push_back(
                submodal.directions[i]
                    ? popcode::encode_node(g, model.lat_d, submodal.directions[i], true)
                    : nullptr);
            out.magnitude.push_back(
                popcode::encode_node(g, model.lat_m, submodal.magnitudes[i], true));
        } else {
            out.posture.push_back(raw_norm_node(g, model.raw_p, submodal.positions[i]));
            out.direction.push_back(
                submodal.directions[i] ? raw_norm_node(g, model.raw_d, submodal.directions[i])
                                       : nullptr);
            out.magnitude.push_back(raw_norm_node(g, model.raw_m, submodal.magnitudes[i]));
        }
    }
    return out;
}

GestaltNodes gestalt_nodes(ad::Graph& g, const GestaltModel& model,
                           const perspective::SubmodalNodes& submodal,
                           const ad::NodePtr& binding_weights, std::size_t n) {
    auto blocks = encode_blocks(g, model, submodal);
    const std::size_t m = model.cfg.slots;
    GestaltNodes out;
    out.posture = binding::bind_node(g, binding_weights, n, m, blocks.posture, model.block_p());
    out.direction =
        binding::bind_node(g, binding_weights, n, m, blocks.direction, model.block_d());
    out.magnitude =
        binding::bind_node(g, binding_weights, n, m, blocks.magnitude, model.block_m());
    return out;
}

LossNodes loss_nodes(ad::Graph& g, const GestaltModel& model, const GestaltNodes& gestalt,
                     double beta_p, double beta_d, double beta_m, LossKind loss) {
    LossNodes out;
    auto vp = vae_forward_node(g, model.posture, gestalt.posture);
    auto vd = vae_forward_node(g, model.direction, gestalt.direction);
    auto vm = vae_forward_node(g, model.magnitude, gestalt.magnitude);
    out.loss_p = recon_loss_node(g, vp.recon, gestalt.posture, loss);
    out.loss_d = recon_loss_node(g, vd.recon, gestalt.direction, loss);
    out.loss_m = recon_loss_node(g, vm.recon, gestalt.magnitude, loss);
    out.combined = g.add(g.scale(out.loss_p, beta_p),
                         g.add(g.scale(out.loss_d, beta_d), g.scale(out.loss_m, beta_m)));
    return out;
}

Losses losses(const GestaltModel& model, std::span<const double> g_p,
              std::span<const double> g_d, std::span<const double> g_m) {
    const auto rp = vae_forward(model.posture, g_p);
    const auto rd = vae_forward(model.direction, g_d);
    const auto rm = vae_forward(model.magnitude, g_m);
    const bool bce = model.cfg.posture_cfg.loss == LossKind::bce;
    Losses out;
    out.loss_p = bce ? bce_plain(rp.recon, g_p) : mse_plain(rp.recon, g_p);
    out.loss_d = bce ? bce_plain(rd.recon, g_d) : mse_plain(rd.recon, g_d);
    out.loss_m = bce ? bce_plain(rm.recon, g_m) : mse_plain(rm.recon, g_m);
    out.combined =
        model.cfg.beta_p * out.loss_p + model.cfg.beta_d * out.loss_d + model.cfg.beta_m * out.loss_m;
    return out;
}

GestaltDataset gestalt_dataset(const GestaltModel& model, const data::FeatureSequence& seq) {
    if (seq.num_features != model.cfg.slots)
        throw std::invalid_argument("gestalt_dataset: training requires N == M");
    perspective::Pose pose;
    pose.dim = seq.dim;
    GestaltDataset out;
    const auto vels = data::velocities(seq);
    for (std::size_t t = 1; t < seq.num_frames(); ++t) {
        const auto sub = perspective::extract_submodal(seq.frames[t], vels[t - 1],
                                                       seq.num_features, pose);
        std::vector<double> gp, gd, gm;
        for (const auto& f : sub.features) {
            if (model.cfg.popcode) {
                auto p = popcode::encode(model.lat_p, f.position, true);
                gp.insert(gp.end(), p.begin(), p.end());
                if (f.direction) {
                    auto d = popcode::encode(model.lat_d, *f.direction, true);
                    gd.insert(gd.end(), d.begin(), d.end());
                } else {
                    gd.insert(gd.end(), model.lat_d.count, 0.0);
                }
                auto m = popcode::encode(model.lat_m, std::span(&f.magnitude, 1), true);
                gm.insert(gm.end(), m.begin(), m.end());
            } else {
                auto p = raw_norm_apply(model.raw_p, f.position);
                gp.insert(gp.end(), p.begin(), p.end());
                if (f.direction) {
                    auto d = raw_norm_apply(model.raw_d, *f.direction);
                    gd.insert(gd.end(), d.begin(), d.end());
                } else {
                    gd.insert(gd.end(), model.cfg.dim, 0.0);
                }
                gm.push_back((f.magnitude - model.raw_m.lo[0]) /
                             (model.raw_m.hi[0] - model.raw_m.lo[0]));
            }
        }
        out.posture.push_back(std::move(gp));
        out.direction.push_back(std::move(gd));
        out.magnitude.push_back(std::move(gm));
    }
    return out;
}

namespace {

void train_vae(VaeParams& params, const std::vector<std::vector<double>>& dataset,
               const VaeConfig& cfg, std::vector<double>& curve, const char* name) {
    std::vector<double> flat = params.flatten();
    ad::AdamState adam(flat.size(), ad::AdamConfig{.lr = cfg.lr});
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t warmup = std::max<std::size_t>(1, cfg.epochs / 10);
    std::vector<double> noise(params.latent), grads(flat.size());
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double klw = cfg.kl_weight *
                           std::min(1.0, static_cast<double>(epoch + 1) /
                                             static_cast<double>(warmup));
        double epoch_recon = 0.0;
        for (std::size_t idx : order) {
            ad::Graph g;
            auto x = g.constant(std::vector<double>(dataset[idx]), {params.input}, "g_x");
            for (auto& e : noise) e = gauss(rng);
            auto vn = build_vae(g, flat, params.input, params.hidden, params.latent, x, noise,
                                true);
            auto recon = recon_loss_node(g, vn.recon, x, cfg.loss);
            // KL normalized per input unit so both terms share the mean-BCE scale.
            auto kl = g.scale(g.kl_standard_normal(vn.mean, vn.logvar),
                              klw / static_cast<double>(params.input));
            auto total = g.add(recon, kl);
            if (!std::isfinite(total->scalar()))
                throw std::runtime_error(std::string("train: non-finite loss in ") + name +
                                         " at epoch " + std::to_string(epoch) + ", frame " +
                                         std::to_string(idx));
            g.backward(total);
            std::size_t off = 0;
            for (const auto& leaf : vn.params) {
                std::copy(leaf->grad.begin(), leaf->grad.end(), grads.begin() + off);
                off += leaf->size();
            }
            ad::adam_step(flat, grads, adam);
            epoch_recon += recon->scalar();
        }
        curve.push_back(epoch_recon / static_cast<double>(dataset.size()));
    }
    params.unflatten(flat);
}

}  // namespace

GestaltModel train(const ModelConfig& cfg_in, const data::FeatureSequence& seq) {
    seq.validate();
    GestaltModel model;
    model.cfg = cfg_in;
    model.cfg.dim = seq.dim;
    model.cfg.slots = seq.num_features;
    model.data_hash = sequence_hash(seq);

    // Stimulus statistics from the training data (identity pose).
    std::vector<double> lo(seq.dim, 1e300), hi(seq.dim, -1e300);
    double max_mag = 0.0;
    const auto vels = data::velocities(seq);
    for (std::size_t t = 0; t < seq.num_frames(); ++t) {
        for (std::size_t i = 0; i < seq.num_features; ++i) {
            for (std::size_t k = 0; k < seq.dim; ++k) {
                lo[k] = std::min(lo[k], seq.frames[t][i * seq.dim + k]);
                hi[k] = std::max(hi[k], seq.frames[t][i * seq.dim + k]);
            }
            if (t >= 1) {
                double m = 0.0;
                for (std::size_t k = 0; k < seq.dim; ++k) {
                    const double v = vels[t - 1][i * seq.dim + k];
                    m += v * v;
                }
                max_mag = std::max(max_mag, std::sqrt(m));
            }
        }
    }
    popcode::Range prange, mrange;
    for (std::size_t k = 0; k < seq.dim; ++k) {
        const double mid = 0.5 * (lo[k] + hi[k]);
        const double half = std::max(0.5 * (hi[k] - lo[k]), 1e-6) * model.cfg.posture_range_scale;
        prange.lo.push_back(mid - half);
        prange.hi.push_back(mid + half);
    }
    mrange.lo = {0.0};
    mrange.hi = {std::max(max_mag, 1e-9) * model.cfg.magnitude_range_scale};

    if (model.cfg.popcode) {
        model.lat_p = popcode::build_lattice(popcode::LatticeKind::posture,
                                             model.cfg.posture_neurons, seq.dim, prange,
                                             model.cfg.zeta_p);
        model.lat_d = popcode::build_lattice(popcode::LatticeKind::direction,
                                             model.cfg.direction_neurons, seq.dim, {},
                                             model.cfg.zeta_d);
        model.lat_m = popcode::build_lattice(popcode::LatticeKind::magnitude,
                                             model.cfg.magnitude_neurons, 1, mrange,
                                             model.cfg.zeta_m);
    } else {
        model.raw_p = {prange.lo, prange.hi};
        model.raw_d = {std::vector<double>(seq.dim, -1.0), std::vector<double>(seq.dim, 1.0)};
        model.raw_m = {mrange.lo, mrange.hi};
    }

    auto& pc = model.cfg.posture_cfg;
    auto& dc = model.cfg.direction_cfg;
    auto& mc = model.cfg.magnitude_cfg;
    pc.input = model.cfg.slots * model.block_p();
    dc.input = model.cfg.slots * model.block_d();
    mc.input = model.cfg.slots * model.block_m();
    pc.seed = model.cfg.seed * 3 + 1;
    dc.seed = model.cfg.seed * 3 + 2;
    mc.seed = model.cfg.seed * 3 + 3;
    model.posture.init(pc.input, pc.hidden, pc.latent, pc.seed);
    model.direction.init(dc.input, dc.hidden, dc.latent, dc.seed);
    model.magnitude.init(mc.input, mc.hidden, mc.latent, mc.seed);

    const auto dataset = gestalt_dataset(model, seq);

    // The three sub-modal VAEs share no state; train them concurrently.
    std::exception_ptr err;
    auto guard = [&err](auto fn) {
        return [&err, fn]() {
            try {
                fn();
            } catch (...) {
                err = std::current_exception();
            }
        };
    };
    std::thread tp(guard([&] { train_vae(model.posture, dataset.posture, pc,
                                         model.curves.posture, "posture"); }));
    std::thread td(guard([&] { train_vae(model.direction, dataset.direction, dc,
                                         model.curves.direction, "direction"); }));
    train_vae(model.magnitude, dataset.magnitude, mc, model.curves.magnitude, "magnitude");
    tp.join();
    td.join();
    if (err) std::rethrow_exception(err);
    return model;
}

// --- checkpoint io -----------------------------------------------------------

namespace {

json vae_cfg_json(const VaeConfig& c) {
    return json{{"input", c.input},   {"hidden", c.hidden}, {"latent", c.latent},
                {"lr", c.lr},         {"kl_weight", c.kl_weight}, {"epochs", c.epochs},
                {"seed", c.seed},
        {"loss", c.loss == LossKind::bce ? "bce" : (c.loss == LossKind::mse ? "mse" : "sse")}};
}

VaeConfig vae_cfg_from_json(const json& j) {
    VaeConfig c;
    c.input = j.at("input");
    c.hidden = j.at("hidden");
    c.latent = j.at("latent");
    c.lr = j.at("lr");
    c.kl_weight = j.at("kl_weight");
    c.epochs = j.at("epochs");
    c.seed = j.at("seed");
    const std::string k = j.at("loss");
    c.loss = k == "bce" ? LossKind::bce : (k == "mse" ? LossKind::mse : LossKind::sse);
    return c;
}

}  // namespace

void save_model(const GestaltModel& model, const std::string& path) {
    json manifest{
        {"popcode", model.cfg.popcode},
        {"slots", model.cfg.slots},
        {"dim", model.cfg.dim},
        {"posture_neurons", model.cfg.posture_neurons},
        {"direction_neurons", model.cfg.direction_neurons},
        {"magnitude_neurons", model.cfg.magnitude_neurons},
        {"zeta", {model.cfg.zeta_p, model.cfg.zeta_d, model.cfg.zeta_m}},
        {"posture_range_scale", model.cfg.posture_range_scale},
        {"magnitude_range_scale", model.cfg.magnitude_range_scale},
        {"beta", {model.cfg.beta_p, model.cfg.beta_d, model.cfg.beta_m}},
        {"seed", model.cfg.seed},
        {"data_hash", model.data_hash},
        {"posture_cfg", vae_cfg_json(model.cfg.posture_cfg)},
        {"direction_cfg", vae_cfg_json(model.cfg.direction_cfg)},
        {"magnitude_cfg", vae_cfg_json(model.cfg.magnitude_cfg)},
        {"curves",
         {{"posture", model.curves.posture},
          {"direction", model.curves.direction},
          {"magnitude", model.curves.magnitude}}},
    };
    if (model.cfg.popcode) {
        manifest["lattices"] = {json::parse(popcode::to_json(model.lat_p)),
                                json::parse(popcode::to_json(model.lat_d)),
                                json::parse(popcode::to_json(model.lat_m))};
    } else {
        manifest["raw_norm"] = {{"p", {{"lo", model.raw_p.lo}, {"hi", model.raw_p.hi}}},
                                {"d", {{"lo", model.raw_d.lo}, {"hi", model.raw_d.hi}}},
                                {"m", {{"lo", model.raw_m.lo}, {"hi", model.raw_m.hi}}}};
    }
    std::vector<double> payload;
    for (const auto* p : {&model.posture, &model.direction, &model.magnitude}) {
        auto flat = p->flatten();
        payload.insert(payload.end(), flat.begin(), flat.end());
    }
    manifest["payload_doubles"] = payload.size();
    const std::string text = manifest.dump();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os.write(kMagic, sizeof kMagic);
    const std::uint64_t len = text.size();
    os.write(reinterpret_cast<const char*>(&len), sizeof len);
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

GestaltModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string text(len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(len));
    json manifest = json::parse(text);

    GestaltModel model;
    model.cfg.popcode = manifest.at("popcode");
    model.cfg.slots = manifest.at("slots");
    model.cfg.dim = manifest.at("dim");
    model.cfg.posture_neurons = manifest.at("posture_neurons");
    model.cfg.direction_neurons = manifest.at("direction_neurons");
    model.cfg.magnitude_neurons = manifest.at("magnitude_neurons");
    model.cfg.zeta_p = manifest.at("zeta")[0];
    model.cfg.zeta_d = manifest.at("zeta")[1];
    model.cfg.zeta_m = manifest.at("zeta")[2];
    model.cfg.posture_range_scale = manifest.at("posture_range_scale");
    model.cfg.magnitude_range_scale = manifest.at("magnitude_range_scale");
    model.cfg.beta_p = manifest.at("beta")[0];
    model.cfg.beta_d = manifest.at("beta")[1];
    model.cfg.beta_m = manifest.at("beta")[2];
    model.cfg.seed = manifest.at("seed");
    model.data_hash = manifest.at("data_hash");
    model.cfg.posture_cfg = vae_cfg_from_json(manifest.at("posture_cfg"));
    model.cfg.direction_cfg = vae_cfg_from_json(manifest.at("direction_cfg"));
    model.cfg.magnitude_cfg = vae_cfg_from_json(manifest.at("magnitude_cfg"));
    model.curves.posture = manifest.at("curves").at("posture").get<std::vector<double>>();
    model.curves.direction = manifest.at("curves").at("direction").get<std::vector<double>>();
    model.curves.magnitude = manifest.at("curves").at("magnitude").get<std::vector<double>>();
    if (model.cfg.popcode) {
        model.lat_p = popcode::lattice_from_json(manifest.at("lattices")[0].dump());
        model.lat_d = popcode::lattice_from_json(manifest.at("lattices")[1].dump());
        model.lat_m = popcode::lattice_from_json(manifest.at("lattices")[2].dump());
    } else {
        const auto& rn = manifest.at("raw_norm");
        model.raw_p = {rn.at("p").at("lo").get<std::vector<double>>(),
                       rn.at("p").at("hi").get<std::vector<double>>()};
        model.raw_d = {rn.at("d").at("lo").get<std::vector<double>>(),
                       rn.at("d").at("hi").get<std::vector<double>>()};
        model.raw_m = {rn.at("m").at("lo").get<std::vector<double>>(),
                       rn.at("m").at("hi").get<std::vector<double>>()};
    }
    const std::uint64_t count = manifest.at("payload_doubles");
    std::vector<double> payload(count);
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("load_model: truncated payload in " + path);
    model.posture.init(model.cfg.posture_cfg.input, model.cfg.posture_cfg.hidden,
                       model.cfg.posture_cfg.latent, 0);
    model.direction.init(model.cfg.direction_cfg.input, model.cfg.direction_cfg.hidden,
                         model.cfg.direction_cfg.latent, 0);
    model.magnitude.init(model.cfg.magnitude_cfg.input, model.cfg.magnitude_cfg.hidden,
                         model.cfg.magnitude_cfg.latent, 0);
    std::size_t off = 0;
    for (auto* p : {&model.posture, &model.direction, &model.magnitude}) {
        p->unflatten(std::span(payload).subspan(off, p->param_count()));
        off += p->param_count();
    }
    return model;
}

std::string sequence_hash(const data::FeatureSequence& seq) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    mix(&seq.num_features, sizeof seq.num_features);
    mix(&seq.dim, sizeof seq.dim);
    mix(&seq.dt, sizeof seq.dt);
    for (const auto& f : seq.frames) mix(f.data(), f.size() * sizeof(double));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gestalt::vae
