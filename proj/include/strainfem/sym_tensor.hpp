#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace strainfem {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Symmetric 3x3 tensor stored as its six independent components,
/// ordered (11, 22, 33, 12, 13, 23).
struct SymTensor3 {
    double e11 = 0.0, e22 = 0.0, e33 = 0.0;
    double e12 = 0.0, e13 = 0.0, e23 = 0.0;

    static SymTensor3 Zero() { return {}; }
    static SymTensor3 Identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }

    static SymTensor3 FromComponents(const Vec6& c) {
        return {c[0], c[1], c[2], c[3], c[4], c[5]};
    }

    // Symmetrizes the input.
    static SymTensor3 FromMatrix(const Eigen::Matrix3d& m) {
        return {m(0, 0), m(1, 1), m(2, 2),
                0.5 * (m(0, 1) + m(1, 0)),
                0.5 * (m(0, 2) + m(2, 0)),
                0.5 * (m(1, 2) + m(2, 1))};
    }

    Vec6 components() const {
        Vec6 c;
        c << e11, e22, e33, e12, e13, e23;
        return c;
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d m;
        m << e11, e12, e13,
             e12, e22, e23,
             e13, e23, e33;
        return m;
    }

    double trace() const { return e11 + e22 + e33; }

    /// Frobenius inner product a:b = sum_ij a_ij b_ij.
    double ddot(const SymTensor3& o) const {
        return e11 * o.e11 + e22 * o.e22 + e33 * o.e33 +
               2.0 * (e12 * o.e12 + e13 * o.e13 + e23 * o.e23);
    }

    double norm() const { return std::sqrt(ddot(*this)); }

    /// Quadratic form t . (e t).
    double quad(const Vec3& t) const {
        return e11 * t[0] * t[0] + e22 * t[1] * t[1] + e33 * t[2] * t[2] +
               2.0 * (e12 * t[0] * t[1] + e13 * t[0] * t[2] + e23 * t[1] * t[2]);
    }

    Vec3 apply(const Vec3& v) const { return matrix() * v; }

    SymTensor3 operator+(const SymTensor3& o) const {
        return {e11 + o.e11, e22 + o.e22, e33 + o.e33,
                e12 + o.e12, e13 + o.e13, e23 + o.e23};
    }
    SymTensor3 operator-(const SymTensor3& o) const {
        return {e11 - o.e11, e22 - o.e22, e33 - o.e33,
                e12 - o.e12, e13 - o.e13, e23 - o.e23};
    }
    SymTensor3 operator*(double s) const {
        return {s * e11, s * e22, s * e33, s * e12, s * e13, s * e23};
    }
};

inline SymTensor3 operator*(double s, const SymTensor3& e) { return e * s; }

}  // namespace strainfem
