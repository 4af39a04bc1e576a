#pragma once

/**
 * @file core.hpp
 * @brief Shared aliases, error types, Gauss quadrature and small tensor helpers.
 */

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace iga {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Invalid user input or inconsistent model setup.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter outside the admissible domain of an evaluation routine.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physically inadmissible state (J <= 0). The solver reacts by bisecting the load step.
struct InadmissibleState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Side : int { South = 0, East = 1, North = 2, West = 3 };

inline constexpr std::array<Side, 4> all_sides{Side::South, Side::East, Side::North, Side::West};

inline const char* side_name(Side s) {
    switch (s) {
        case Side::South: return "south";
        case Side::East: return "east";
        case Side::North: return "north";
        case Side::West: return "west";
    }
    return "?";
}

/// 90 degree clockwise rotation; used to turn curve tangents into normals.
inline Vec2 perp(const Vec2& v) { return Vec2(v.y(), -v.x()); }

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1,1]
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes computed by Newton iteration on the Legendre polynomial; cached per order.
inline const GaussRule& gauss_rule(int npts) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(npts);
    if (it != cache.end()) return it->second;
    if (npts < 1 || npts > 30) throw ConfigError("gauss_rule: unsupported point count");

    GaussRule rule;
    rule.nodes.resize(npts);
    rule.weights.resize(npts);
    const int n = npts;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    auto [pos, ok] = cache.emplace(npts, std::move(rule));
    return pos->second;
}

// ---------------------------------------------------------------------------
// Small fixed-size tensors for constitutive tangents
// ---------------------------------------------------------------------------

/// Fourth-order tensor in 2D, A(i,j,k,l).
struct Tensor4 {
    std::array<double, 16> v{};
    double& operator()(int i, int j, int k, int l) { return v[((i * 2 + j) * 2 + k) * 2 + l]; }
    double operator()(int i, int j, int k, int l) const { return v[((i * 2 + j) * 2 + k) * 2 + l]; }
};

/// Sixth-order tensor in 2D, D(i,j,k,l,m,n) = dA(i,j,k,l)/dF(m,n).
struct Tensor6 {
    std::array<double, 64> v{};
    double& operator()(int i, int j, int k, int l, int m, int n) {
        return v[((((i * 2 + j) * 2 + k) * 2 + l) * 2 + m) * 2 + n];
    }
    double operator()(int i, int j, int k, int l, int m, int n) const {
        return v[((((i * 2 + j) * 2 + k) * 2 + l) * 2 + m) * 2 + n];
    }
};

}  // namespace iga
