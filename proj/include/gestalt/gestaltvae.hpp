#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gestalt/binding.hpp"
#include "gestalt/datagen.hpp"
#include "gestalt/diffcore.hpp"
#include "gestalt/popcode.hpp"

// Three variational autoencoders (posture, direction, magnitude) trained on
// canonical-perspective, correctly-bound Gestalt vectors, plus the combined
// weighted loss that drives retrospective inference.

namespace gestalt::vae {

enum class LossKind { bce, mse, sse };  // sse = summed squared error

struct VaeConfig {
    std::size_t input = 0;  // filled from lattice * slots at build time
    std::size_t hidden = 45;
    std::size_t latent = 25;
    double lr = 1e-3;
    // Small KL pressure: enough to regularize the latent without blurring
    // reconstructions, which the downstream bias adaptation depends on.
    double kl_weight = 1e-3;  // applied to KL/input, linear warm-up over first 10% of epochs
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::bce;
};

// One hidden tanh layer per encoder/decoder; sigmoid output units.
struct VaeParams {
    std::size_t input = 0, hidden = 0, latent = 0;
    std::vector<double> w1, b1;  // encoder hidden
    std::vector<double> wm, bm;  // posterior mean
    std::vector<double> wl, bl;  // posterior log-variance
    std::vector<double> v1, c1;  // decoder hidden
    std::vector<double> v2, c2;  // reconstruction

    void init(std::size_t in, std::size_t hid, std::size_t lat, std::uint64_t seed);
    std::size_t param_count() const;
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);
};

struct VaeNodes {
    ad::NodePtr recon, mean, logvar;
    std::vector<ad::NodePtr> params;  // leaf order matches flatten()
};

// Builds the VAE forward graph. noise: per-latent standard-normal draw for
// the reparameterization sample; absent noise decodes the posterior mean
// (deterministic, the retrospective-inference path). trainable controls
// whether parameters become variables or constants.
VaeNodes vae_forward_node(ad::Graph& g, const VaeParams& p, const ad::NodePtr& input,
                          std::span<const double> noise = {}, bool trainable = false);

struct VaeOutput {
    std::vector<double> recon, mean, logvar;
};

// Deterministic one-shot evaluation (posterior mean).
VaeOutput vae_forward(const VaeParams& p, std::span<const double> input);

// ---------------------------------------------------------------------------

struct ModelConfig {
    bool popcode = true;
    std::size_t slots = 0;  // M
    std::size_t dim = 0;    // 2 or 3
    std::size_t posture_neurons = 64, direction_neurons = 32, magnitude_neurons = 4;
    double zeta_p = 0.85, zeta_d = 0.85, zeta_m = 0.95;
    // Stimulus coverage: posture range = training bbox expanded by this factor
    // per axis (1.2 = +20%); magnitude range = [0, magnitude_range_scale * max].
    double posture_range_scale = 1.2;
    double magnitude_range_scale = 1.5;
    VaeConfig posture_cfg, direction_cfg, magnitude_cfg;
    double beta_p = 1.0, beta_d = 1.0, beta_m = 1.0;  // inference loss weights
    std::uint64_t seed = 0;
};

// Per-channel affine normalization [lo, hi] -> [0, 1] for raw mode.
struct RawNorm {
    std::vector<double> lo, hi;  // per channel
};

struct TrainingCurves {
    // One entry per epoch: mean reconstruction loss over the epoch's frames.
    std::vector<double> posture, direction, magnitude;
};

struct GestaltModel {
    ModelConfig cfg;
    popcode::Lattice lat_p, lat_d, lat_m;  // valid when cfg.popcode
    RawNorm raw_p, raw_d, raw_m;           // valid when !cfg.popcode
    VaeParams posture, direction, magnitude;
    std::string data_hash;
    TrainingCurves curves;

    std::size_t block_p() const;  // per-feature posture block length
    std::size_t block_d() const;
    std::size_t block_m() const;
};

// --- shared encoding front end --------------------------------------------

// Differentiable per-feature block nodes for one sub-modality triplet.
struct FeatureBlocks {
    std::vector<ad::NodePtr> posture;    // per feature
    std::vector<ad::NodePtr> direction;  // nullptr marks an absent direction
    std::vector<ad::NodePtr> magnitude;
};

FeatureBlocks encode_blocks(ad::Graph& g, const GestaltModel& model,
                            const perspective::SubmodalNodes& submodal);

struct GestaltNodes {
    ad::NodePtr posture, direction, magnitude;  // slot-major Gestalt vectors
};

GestaltNodes gestalt_nodes(ad::Graph& g, const GestaltModel& model,
                           const perspective::SubmodalNodes& submodal,
                           const ad::NodePtr& binding_weights, std::size_t n);

// Reconstruction losses (β-free) plus L = β_p L_p + β_d L_d + β_m L_m.
struct LossNodes {
    ad::NodePtr loss_p, loss_d, loss_m, combined;
};

LossNodes loss_nodes(ad::Graph& g, const GestaltModel& model, const GestaltNodes& gestalt,
                     double beta_p, double beta_d, double beta_m, LossKind loss);

struct Losses {
    double loss_p = 0, loss_d = 0, loss_m = 0, combined = 0;
};

// Plain evaluation of the three reconstruction losses and their combination.
Losses losses(const GestaltModel& model, std::span<const double> g_p,
              std::span<const double> g_d, std::span<const double> g_m);

// --- training ---------------------------------------------------------------

// Trains the three VAEs on the sequence observed from the canonical pose with
// the frozen diagonal binding. Throws on non-finite loss (epoch/frame named).
GestaltModel train(const ModelConfig& cfg, const data::FeatureSequence& seq);

// Canonical training-time Gestalt vectors (identity pose, diagonal binding)
// for every frame t >= 1.
struct GestaltDataset {
    std::vector<std::vector<double>> posture, direction, magnitude;
};

GestaltDataset gestalt_dataset(const GestaltModel& model, const data::FeatureSequence& seq);

// Checkpoint = JSON manifest + little-endian float64 payload in one file.
void save_model(const GestaltModel& model, const std::string& path);
GestaltModel load_model(const std::string& path);

// FNV-1a over the raw frame bytes; pins data identity in manifests.
std::string sequence_hash(const data::FeatureSequence& seq);

}  // namespace gestalt::vae
