#include <strainfem/quadrature.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace strainfem {

namespace {

// Newton iteration on the Legendre polynomial; standard Golub-ish seed.
std::vector<std::pair<double, double>> compute_gl(int n) {
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // p0 holds P_{n-1}(x) after the recurrence.
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,1].
        pts[i] = {0.5 * (1.0 - x), 0.5 * w};
    }
    return pts;
}

}  // namespace

const std::vector<std::pair<double, double>>& gauss_legendre_01(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("gauss_legendre_01: n out of range");
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

std::vector<QuadPoint> tet_quadrature(const std::array<Vec3, 4>& v, int order) {
    const Vec3 d1 = v[1] - v[0], d2 = v[2] - v[0], d3 = v[3] - v[0];
    const double vol6 = d1.dot(d2.cross(d3));
    const double vol = vol6 / 6.0;
    auto at = [&](double x, double y, double z) -> Vec3 {
        return v[0] + x * d1 + y * d2 + z * d3;
    };
    std::vector<QuadPoint> q;
    if (order <= 1) {
        q.push_back({at(0.25, 0.25, 0.25), vol});
        return q;
    }
    if (order == 2) {
        const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
        const double b = (5.0 - std::sqrt(5.0)) / 20.0;
        const double w = vol / 4.0;
        q.push_back({at(a, b, b), w});
        q.push_back({at(b, a, b), w});
        q.push_back({at(b, b, a), w});
        q.push_back({at(b, b, b), w});
        return q;
    }
    // Duffy collapse x=u, y=s(1-u), z=t(1-u)(1-s); Jacobian (1-u)^2 (1-s).
    // The pulled-back integrand of a degree-p polynomial has u-degree p+2,
    // so m Gauss points per axis are exact for p <= 2m-3.
    const int m = (order + 3 + 1) / 2;
    const auto& gl = gauss_legendre_01(m);
    for (const auto& [u, wu] : gl)
        for (const auto& [s, ws] : gl)
            for (const auto& [t, wt] : gl) {
                const double x = u;
                const double y = s * (1.0 - u);
                const double z = t * (1.0 - u) * (1.0 - s);
                const double jac = (1.0 - u) * (1.0 - u) * (1.0 - s);
                q.push_back({at(x, y, z), wu * ws * wt * jac * vol6});
            }
    return q;
}

std::vector<QuadPoint> tri_quadrature(const std::array<Vec3, 3>& v, int order) {
    const Vec3 d1 = v[1] - v[0], d2 = v[2] - v[0];
    const double area2 = d1.cross(d2).norm();
    const double area = 0.5 * area2;
    auto at = [&](double x, double y) -> Vec3 { return v[0] + x * d1 + y * d2; };
    std::vector<QuadPoint> q;
    if (order <= 1) {
        q.push_back({at(1.0 / 3.0, 1.0 / 3.0), area});
        return q;
    }
    if (order == 2) {
        const double w = area / 3.0;
        q.push_back({at(0.5, 0.0), w});
        q.push_back({at(0.0, 0.5), w});
        q.push_back({at(0.5, 0.5), w});
        return q;
    }
    // Duffy collapse x=u, y=s(1-u); Jacobian (1-u).
    const int m = (order + 2 + 1) / 2;
    const auto& gl = gauss_legendre_01(m);
    for (const auto& [u, wu] : gl)
        for (const auto& [s, ws] : gl) {
            const double x = u;
            const double y = s * (1.0 - u);
            q.push_back({at(x, y), wu * ws * (1.0 - u) * area2});
        }
    return q;
}

}  // namespace strainfem
