#pragma once

#include <strainfem/sym_tensor.hpp>

#include <array>
#include <utility>
#include <vector>

namespace strainfem {

struct QuadPoint {
    Vec3 x;
    double w;
};

/// Gauss-Legendre nodes and weights on [0,1]; weights sum to 1. n in [1, 20].
const std::vector<std::pair<double, double>>& gauss_legendre_01(int n);

/// Quadrature on the tetrahedron spanned by v; weights sum to its volume.
/// order <= 1: centroid rule; order == 2: symmetric 4-point rule;
/// order >= 3: collapsed-coordinate Gauss product rule exact to the
/// requested polynomial degree.
std::vector<QuadPoint> tet_quadrature(const std::array<Vec3, 4>& v, int order);

/// Quadrature on the triangle spanned by v; weights sum to its area.
/// order <= 1: centroid; order == 2: edge-midpoint rule; order >= 3:
/// collapsed-coordinate Gauss product rule.
std::vector<QuadPoint> tri_quadrature(const std::array<Vec3, 3>& v, int order);

}  // namespace strainfem
