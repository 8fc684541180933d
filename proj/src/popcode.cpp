#include "gestalt/popcode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace gestalt::popcode {

namespace {

double min_pairwise_distance(const std::vector<double>& centers, std::size_t count,
                             std::size_t dim) {
    double best = std::numeric_limits<double>::max();
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                double d = centers[a * dim + k] - centers[b * dim + k];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
    }
    return std::sqrt(best);
}

std::size_t grid_side(std::size_t count, std::size_t dim) {
    const auto side = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(dim))));
    for (std::size_t g : {side, side + 1, side > 1 ? side - 1 : side}) {
        std::size_t n = 1;
        for (std::size_t k = 0; k < dim; ++k) n *= g;
        if (n == count && g >= 2) return g;
    }
    std::string admissible;
    for (std::size_t g = 2; g <= 6; ++g) {
        std::size_t n = 1;
        for (std::size_t k = 0; k < dim; ++k) n *= g;
        admissible += (admissible.empty() ? "" : ", ") + std::to_string(n);
    }
    throw std::invalid_argument("build_lattice: posture count " + std::to_string(count) +
                                " is not a " + std::to_string(dim) +
                                "D grid; admissible counts: " + admissible + ", ...");
}

}  // namespace

double Lattice::peak() const {
    return std::pow(spacing, static_cast<double>(dim)) *
           std::pow(2.0 * M_PI * sigma, -0.5 * static_cast<double>(dim));
}

Lattice build_lattice(LatticeKind kind, std::size_t count, std::size_t dim, const Range& range,
                      double zeta) {
    if (zeta <= 0.0 || zeta > 1.0)
        throw std::invalid_argument("build_lattice: zeta must be in (0, 1]");
    if (count < 2) throw std::invalid_argument("build_lattice: need at least 2 neurons");
    Lattice lat;
    lat.kind = kind;
    lat.zeta = zeta;
    lat.count = count;
    switch (kind) {
        case LatticeKind::posture: {
            if (dim != 2 && dim != 3)
                throw std::invalid_argument("build_lattice: posture dim must be 2 or 3");
            if (range.lo.size() != dim || range.hi.size() != dim)
                throw std::invalid_argument("build_lattice: range must have one bound per axis");
            const std::size_t g = grid_side(count, dim);
            lat.dim = dim;
            lat.centers.resize(count * dim);
            for (std::size_t a = 0; a < count; ++a) {
                std::size_t rem = a;
                for (std::size_t k = 0; k < dim; ++k) {
                    const std::size_t idx = rem % g;
                    rem /= g;
                    lat.centers[a * dim + k] =
                        range.lo[k] + (range.hi[k] - range.lo[k]) *
                                          static_cast<double>(idx) / static_cast<double>(g - 1);
                }
            }
            break;
        }
        case LatticeKind::direction: {
            if (dim == 2) {
                lat.dim = 2;
                lat.centers.resize(count * 2);
                for (std::size_t a = 0; a < count; ++a) {
                    const double th = 2.0 * M_PI * static_cast<double>(a) /
                                      static_cast<double>(count);
                    lat.centers[a * 2] = std::cos(th);
                    lat.centers[a * 2 + 1] = std::sin(th);
                }
            } else if (dim == 3) {
                // Fibonacci sphere: deterministic near-uniform coverage at any count.
                lat.dim = 3;
                lat.centers.resize(count * 3);
                const double golden = M_PI * (3.0 - std::sqrt(5.0));
                for (std::size_t a = 0; a < count; ++a) {
                    const double z = 1.0 - 2.0 * (static_cast<double>(a) + 0.5) /
                                               static_cast<double>(count);
                    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
                    const double th = golden * static_cast<double>(a);
                    lat.centers[a * 3] = rad * std::cos(th);
                    lat.centers[a * 3 + 1] = rad * std::sin(th);
                    lat.centers[a * 3 + 2] = z;
                }
            } else {
                throw std::invalid_argument("build_lattice: direction dim must be 2 or 3");
            }
            break;
        }
        case LatticeKind::magnitude: {
            lat.dim = 1;
            if (range.lo.size() != 1 || range.hi.size() != 1 || range.hi[0] <= range.lo[0])
                throw std::invalid_argument("build_lattice: magnitude needs a 1D range");
            lat.centers.resize(count);
            for (std::size_t a = 0; a < count; ++a)
                lat.centers[a] = range.lo[0] + (range.hi[0] - range.lo[0]) *
                                                   static_cast<double>(a) /
                                                   static_cast<double>(count - 1);
            break;
        }
    }
    lat.spacing = min_pairwise_distance(lat.centers, lat.count, lat.dim);
    lat.sigma = lat.zeta * lat.spacing * lat.spacing;
    return lat;
}

std::vector<double> encode(const Lattice& lat, std::span<const double> stimulus,
                           bool normalized) {
    if (stimulus.size() != lat.dim)
        throw std::invalid_argument("encode: stimulus dimensionality mismatch");
    const double scale = normalized ? 1.0 : lat.peak();
    std::vector<double> act(lat.count);
    for (std::size_t a = 0; a < lat.count; ++a) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < lat.dim; ++k) {
            const double d = stimulus[k] - lat.centers[a * lat.dim + k];
            d2 += d * d;
        }
        act[a] = scale * std::exp(-0.5 * d2 / lat.sigma);
    }
    return act;
}

ad::NodePtr encode_node(ad::Graph& g, const Lattice& lat, const ad::NodePtr& stimulus,
                        bool normalized) {
    auto value = encode(lat, std::span<const double>(stimulus->value), normalized);
    const Lattice* lp = &lat;  // lattices are immutable after construction
    return g.custom({lat.count}, std::move(value), {stimulus}, [lp](ad::Node& n) {
        auto& ps = *n.parents[0];
        if (!ps.needs_grad) return;
        // d act_a / d s_k = act_a * (c_ak - s_k) / sigma
        for (std::size_t a = 0; a < lp->count; ++a) {
            const double w = n.grad[a] * n.value[a] / lp->sigma;
            for (std::size_t k = 0; k < lp->dim; ++k)
                ps.grad[k] += w * (lp->centers[a * lp->dim + k] - ps.value[k]);
        }
    }, "encode");
}

EncodedFrame encode_frame(const Lattice& posture, const Lattice& direction,
                          const Lattice& magnitude, const perspective::SubmodalFrame& frame,
                          bool normalized) {
    EncodedFrame out;
    for (const auto& f : frame.features) {
        auto p = encode(posture, f.position, normalized);
        out.posture.insert(out.posture.end(), p.begin(), p.end());
        if (f.direction) {
            auto d = encode(direction, *f.direction, normalized);
            out.direction.insert(out.direction.end(), d.begin(), d.end());
        } else {
            out.direction.insert(out.direction.end(), direction.count, 0.0);
        }
        auto m = encode(magnitude, std::span<const double>(&f.magnitude, 1), normalized);
        out.magnitude.insert(out.magnitude.end(), m.begin(), m.end());
    }
    return out;
}

std::string to_json(const Lattice& lat) {
    nlohmann::json j{
        {"kind", lat.kind == LatticeKind::posture ? "posture"
                 : lat.kind == LatticeKind::direction ? "direction" : "magnitude"},
        {"dim", lat.dim},
        {"count", lat.count},
        {"zeta", lat.zeta},
        {"spacing", lat.spacing},
        {"sigma", lat.sigma},
        {"centers", lat.centers},
    };
    return j.dump();
}

Lattice lattice_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Lattice lat;
    const std::string kind = j.at("kind");
    lat.kind = kind == "posture" ? LatticeKind::posture
               : kind == "direction" ? LatticeKind::direction : LatticeKind::magnitude;
    lat.dim = j.at("dim");
    lat.count = j.at("count");
    lat.zeta = j.at("zeta");
    lat.spacing = j.at("spacing");
    lat.sigma = j.at("sigma");
    lat.centers = j.at("centers").get<std::vector<double>>();
    if (lat.centers.size() != lat.count * lat.dim)
        throw std::invalid_argument("lattice_from_json: center count mismatch");
    return lat;
}

}  // namespace gestalt::popcode
