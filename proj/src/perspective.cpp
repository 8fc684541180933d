#include "gestalt/perspective.hpp"

#include <cmath>
#include <stdexcept>

namespace gestalt::perspective {

Mat3 rotation_from_euler(double ax, double ay, double az) {
    const double cx = std::cos(ax), sx = std::sin(ax);
    const double cy = std::cos(ay), sy = std::sin(ay);
    const double cz = std::cos(az), sz = std::sin(az);
    // Rx * Ry * Rz, row-major.
    return Mat3{
        cy * cz,                 -cy * sz,                sy,
        cx * sz + sx * sy * cz,  cx * cz - sx * sy * sz,  -sx * cy,
        sx * sz - cx * sy * cz,  sx * cz + cx * sy * sz,  cx * cy,
    };
}

Mat3 rotation_from_euler(const Pose& pose) {
    if (pose.dim == 2) return rotation_from_euler(0.0, 0.0, pose.angles[2]);
    return rotation_from_euler(pose.angles[0], pose.angles[1], pose.angles[2]);
}

Mat3 transpose(const Mat3& r) {
    return Mat3{r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]};
}

std::array<double, 3> apply(const Mat3& r, std::span<const double> x) {
    std::array<double, 3> v{x[0], x[1], x.size() > 2 ? x[2] : 0.0};
    return {r[0] * v[0] + r[1] * v[1] + r[2] * v[2],
            r[3] * v[0] + r[4] * v[1] + r[5] * v[2],
            r[6] * v[0] + r[7] * v[1] + r[8] * v[2]};
}

SubmodalFrame extract_submodal(std::span<const double> frame, std::span<const double> velocity,
                               std::size_t n, const Pose& pose) {
    const std::size_t d = pose.dim;
    if (frame.size() != n * d || velocity.size() != n * d)
        throw std::invalid_argument("extract_submodal: frame/velocity size mismatch");
    const Mat3 r = rotation_from_euler(pose);
    SubmodalFrame out;
    out.features.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& f = out.features[i];
        const auto rx = apply(r, frame.subspan(i * d, d));
        f.position.resize(d);
        for (std::size_t k = 0; k < d; ++k) f.position[k] = rx[k] + pose.translation[k];
        const auto rv = apply(r, velocity.subspan(i * d, d));
        double m = 0.0;
        for (std::size_t k = 0; k < d; ++k) m += rv[k] * rv[k];
        m = std::sqrt(m);
        f.magnitude = m;
        if (m >= kVelocityEpsilon) {
            std::vector<double> dir(d);
            for (std::size_t k = 0; k < d; ++k) dir[k] = rv[k] / m;
            f.direction = std::move(dir);
        }
    }
    return out;
}

void adapt_pose(Pose& pose, std::span<const double> angle_grads,
                std::span<const double> translation_grads, double eta_rot, double gamma_rot,
                double eta_trans, double gamma_trans) {
    const std::size_t na = pose.num_angles();
    if (angle_grads.size() != na || translation_grads.size() != pose.dim)
        throw std::invalid_argument("adapt_pose: gradient size mismatch");
    // 2D poses adapt angles[2] and translation[0..1].
    if (pose.dim == 2) {
        std::array<double, 1> a{pose.angles[2]};
        pose.angle_hist.apply(a, angle_grads, eta_rot, gamma_rot);
        pose.angles[2] = a[0];
        std::array<double, 2> b{pose.translation[0], pose.translation[1]};
        pose.translation_hist.apply(b, translation_grads, eta_trans, gamma_trans);
        pose.translation[0] = b[0];
        pose.translation[1] = b[1];
    } else {
        pose.angle_hist.apply(std::span<double>(pose.angles), angle_grads, eta_rot, gamma_rot);
        pose.translation_hist.apply(std::span<double>(pose.translation), translation_grads,
                                    eta_trans, gamma_trans);
    }
}

ad::NodePtr rotation_node(ad::Graph& g, const ad::NodePtr& angles, std::size_t dim) {
    if (dim == 2) {
        if (angles->size() != 1)
            throw std::invalid_argument("rotation_node: 2D pose takes one angle");
        const double a = angles->value[0];
        const double c = std::cos(a), s = std::sin(a);
        return g.custom({2, 2}, {c, -s, s, c}, {angles}, [](ad::Node& n) {
            auto& pa = *n.parents[0];
            if (!pa.needs_grad) return;
            // dR/da = [[-s,-c],[c,-s]]
            const double c0 = n.value[0], s0 = n.value[2];
            pa.grad[0] += -s0 * n.grad[0] - c0 * n.grad[1] + c0 * n.grad[2] - s0 * n.grad[3];
        }, "rotation2d");
    }
    if (angles->size() != 3)
        throw std::invalid_argument("rotation_node: 3D pose takes three angles");
    const double ax = angles->value[0], ay = angles->value[1], az = angles->value[2];
    const Mat3 r = rotation_from_euler(ax, ay, az);
    // Partial derivative matrices of Rx*Ry*Rz w.r.t. each angle.
    const double cx = std::cos(ax), sx = std::sin(ax);
    const double cy = std::cos(ay), sy = std::sin(ay);
    const double cz = std::cos(az), sz = std::sin(az);
    const Mat3 dax{
        0, 0, 0,
        -sx * sz + cx * sy * cz,  -sx * cz - cx * sy * sz,  -cx * cy,
        cx * sz + sx * sy * cz,   cx * cz - sx * sy * sz,   -sx * cy,
    };
    const Mat3 day{
        -sy * cz,                 sy * sz,                  cy,
        sx * cy * cz,             -sx * cy * sz,            sx * sy,
        -cx * cy * cz,            cx * cy * sz,             -cx * sy,
    };
    const Mat3 daz{
        -cy * sz,                 -cy * cz,                 0,
        cx * cz - sx * sy * sz,   -cx * sz - sx * sy * cz,  0,
        sx * cz + cx * sy * sz,   -sx * sz + cx * sy * cz,  0,
    };
    return g.custom({3, 3}, std::vector<double>(r.begin(), r.end()), {angles},
                    [dax, day, daz](ad::Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t k = 0; k < 9; ++k) {
            pa.grad[0] += n.grad[k] * dax[k];
            pa.grad[1] += n.grad[k] * day[k];
            pa.grad[2] += n.grad[k] * daz[k];
        }
    }, "rotation3d");
}

SubmodalNodes submodal_nodes(ad::Graph& g, std::span<const double> frame,
                             std::span<const double> velocity, std::size_t n, std::size_t dim,
                             const ad::NodePtr& rotation, const ad::NodePtr& translation) {
    if (frame.size() != n * dim || velocity.size() != n * dim)
        throw std::invalid_argument("submodal_nodes: frame/velocity size mismatch");
    SubmodalNodes out;
    out.positions.reserve(n);
    out.directions.reserve(n);
    out.magnitudes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = g.constant(std::vector<double>(frame.begin() + i * dim,
                                                frame.begin() + (i + 1) * dim),
                            {dim}, "x_i");
        out.positions.push_back(g.add(g.matvec(rotation, x), translation));
        std::vector<double> v(velocity.begin() + i * dim, velocity.begin() + (i + 1) * dim);
        double m = 0.0;
        for (double c : v) m += c * c;
        m = std::sqrt(m);
        // ||V|| equals ||R*V||; using the raw norm keeps magnitude losses
        // structurally free of pose gradients.
        out.magnitudes.push_back(g.constant({m}, {1}, "m_i"));
        if (m >= kVelocityEpsilon) {
            auto vn = g.constant(std::move(v), {dim}, "v_i");
            out.directions.push_back(g.scale(g.matvec(rotation, vn), 1.0 / m));
        } else {
            out.directions.push_back(nullptr);
        }
    }
    return out;
}

}  // namespace gestalt::perspective
