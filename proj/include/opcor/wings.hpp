#pragma once

#include "opcor/correction.hpp"
#include "opcor/dense.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace opcor {

using Point2 = Eigen::Vector2d;

// Straight surface element with collocation point at the midpoint.
struct Panel {
    Point2 start;
    Point2 end;
    Point2 centroid;
    Point2 normal;  // outward unit normal
    double length = 0.0;
};

// Builds a panel from its endpoints; the outward normal assumes the clockwise
// traversal produced by wing_profile (trailing edge -> lower surface ->
// leading edge -> upper surface).
inline Panel make_panel(const Point2& start, const Point2& end) {
    Panel p;
    p.start = start;
    p.end = end;
    p.length = (end - start).norm();
    require(p.length > 0.0, "make_panel: zero-length panel");
    p.centroid = 0.5 * (start + end);
    const Point2 tangent = (end - start) / p.length;
    p.normal = Point2(-tangent.y(), tangent.x());
    return p;
}

struct WingConfig {
    int panels_per_wing = 198;
    double chord = 1.0;
    double thickness_ratio = 0.12;
    Point2 second_wing_offset{0.0, 0.5};  // half a chord of vertical gap at the default chord
};

inline void validate(const WingConfig& c) {
    require(c.panels_per_wing >= 8 && c.panels_per_wing % 2 == 0,
            "WingConfig: panels_per_wing must be even and >= 8");
    require(c.chord > 0.0, "WingConfig: chord must be positive");
    require(c.thickness_ratio > 0.0 && c.thickness_ratio < 1.0,
            "WingConfig: thickness_ratio must lie in (0,1)");
}

// Symmetric four-digit thickness distribution with the closed-trailing-edge
// x^4 coefficient; returns the half-thickness at chord fraction xbar.
inline double half_thickness(double xbar, double thickness_ratio, double chord) {
    return 5.0 * thickness_ratio * chord *
           (0.2969 * std::sqrt(xbar) - 0.1260 * xbar - 0.3516 * xbar * xbar +
            0.2843 * xbar * xbar * xbar - 0.1036 * xbar * xbar * xbar * xbar);
}

// Closed polygonal discretization of a symmetric wing section, translated by
// `offset`. Cosine spacing clusters panels at the leading and trailing edges.
inline std::vector<Panel> wing_profile(const WingConfig& config, const Point2& offset) {
    validate(config);
    const int count = config.panels_per_wing;
    std::vector<Point2> points;
    points.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double beta = 2.0 * std::numbers::pi * k / count;
        const double xbar = 0.5 * (1.0 + std::cos(beta));
        const double magnitude = half_thickness(xbar, config.thickness_ratio, config.chord);
        const double y = (k == 0 || 2 * k == count) ? 0.0 : (2 * k < count ? -magnitude : magnitude);
        points.emplace_back(config.chord * xbar + offset.x(), y + offset.y());
    }
    std::vector<Panel> panels;
    panels.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k)
        panels.push_back(make_panel(points[static_cast<size_t>(k)],
                                    points[static_cast<size_t>((k + 1) % count)]));
    return panels;
}

// Source-influence matrix over one panel list: entry (i, j) is the normal
// velocity induced at collocation point i by a unit-strength constant source
// on panel j (midpoint quadrature), and the diagonal carries the 1/2
// self-influence of a constant source panel.
inline Matrix assemble_influence(const std::vector<Panel>& panels) {
    require(!panels.empty(), "assemble_influence: empty panel list");
    const int p = static_cast<int>(panels.size());
    Matrix t(p, p);
    for (int i = 0; i < p; ++i) {
        const auto& pi = panels[static_cast<size_t>(i)];
        for (int j = 0; j < p; ++j) {
            if (i == j) {
                t(i, j) = 0.5;
                continue;
            }
            const auto& pj = panels[static_cast<size_t>(j)];
            const Point2 r = pi.centroid - pj.centroid;
            const double dist_sq = r.squaredNorm();
            if (dist_sq < 1e-24)
                throw GeometryDegenerate("assemble_influence: coincident panel centroids");
            t(i, j) = pj.length / (2.0 * std::numbers::pi) * r.dot(pi.normal) / dist_sq;
        }
    }
    return t;
}

// Influence operator of the two-body configuration, wing1 panels first.
inline Matrix assemble_full_operator(const std::vector<Panel>& wing1,
                                     const std::vector<Panel>& wing2) {
    require(!wing1.empty() && !wing2.empty(), "assemble_full_operator: both wings must be non-empty");
    std::vector<Panel> all = wing1;
    all.insert(all.end(), wing2.begin(), wing2.end());
    Matrix t = assemble_influence(all);
    try {
        LuFactorization probe(t);
    } catch (const SingularOperator&) {
        throw GeometryDegenerate("assemble_full_operator: singular influence matrix");
    }
    return t;
}

// Leading principal block: the operator obtained by forgetting the second
// wing entirely.
inline Matrix misspecified_operator(const Matrix& full, int wing1_size) {
    require(wing1_size >= 1 && wing1_size <= full.rows(),
            "misspecified_operator: wing1_size out of range");
    return full.topLeftCorner(wing1_size, wing1_size);
}

// Non-penetration control: q_j = v_w . n_j for wing velocity at the given
// angle (degrees) and speed.
inline Vector control_vector(const std::vector<Panel>& panels, double angle_deg, double speed) {
    require(speed > 0.0, "control_vector: speed must be positive");
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const Point2 velocity(speed * std::cos(theta), speed * std::sin(theta));
    Vector q(panels.size());
    for (size_t j = 0; j < panels.size(); ++j)
        q(static_cast<Eigen::Index>(j)) = velocity.dot(panels[j].normal);
    return q;
}

struct DatasetConfig {
    std::vector<double> angles_deg;
    double speed = 1.0;
    double noise_std = 0.0;
    std::uint64_t seed = 0;  // used only when noise_std > 0
};

inline void validate(const DatasetConfig& c) {
    require(!c.angles_deg.empty(), "DatasetConfig: angle list must be non-empty");
    require(c.speed > 0.0, "DatasetConfig: speed must be positive");
    require(c.noise_std >= 0.0, "DatasetConfig: noise_std must be non-negative");
}

inline std::vector<double> linspace(double lo, double hi, int count) {
    require(count >= 1, "linspace: count must be >= 1");
    std::vector<double> v(static_cast<size_t>(count));
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int k = 0; k < count; ++k)
        v[static_cast<size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    return v;
}

inline std::vector<double> default_training_angles() { return linspace(-45.0, 45.0, 50); }

// Offset endpoints so test angles never coincide with training angles.
inline std::vector<double> default_test_angles() { return linspace(-44.55, 44.55, 100); }

// Solves the fully specified model for every angle and restricts states and
// controls to the selector's rows (the wing of interest). Bitwise
// reproducible when noise_std = 0.
inline TrainingSet generate_dataset(const Matrix& full_operator,
                                    const ObservationSelector& selector,
                                    const std::vector<Panel>& panels, const DatasetConfig& config) {
    validate(config);
    require(full_operator.rows() == full_operator.cols(), "generate_dataset: operator must be square");
    require(static_cast<Eigen::Index>(panels.size()) == full_operator.rows(),
            "generate_dataset: panel count must match the operator dimension");
    require(selector.state_dim == full_operator.rows(),
            "generate_dataset: selector dimension must match the operator");

    const int realizations = static_cast<int>(config.angles_deg.size());
    Matrix controls_full(full_operator.rows(), realizations);
    for (int c = 0; c < realizations; ++c)
        controls_full.col(c) =
            control_vector(panels, config.angles_deg[static_cast<size_t>(c)], config.speed);

    LuFactorization lu(full_operator);
    const Matrix states = lu.solve(controls_full);

    TrainingSet set;
    set.controls = observe(selector, controls_full);
    set.observations = observe(selector, states);
    if (config.noise_std > 0.0) {
        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> noise(0.0, config.noise_std);
        for (Eigen::Index c = 0; c < set.observations.cols(); ++c)
            for (Eigen::Index r = 0; r < set.observations.rows(); ++r)
                set.observations(r, c) += noise(rng);
    }
    return set;
}

}  // namespace opcor
