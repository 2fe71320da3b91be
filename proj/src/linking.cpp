#include "reeblab/linking.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace reeblab {

double gauss_linking_integral(const std::vector<Eigen::Vector3d>& curve1,
                              const std::vector<Eigen::Vector3d>& curve2) {
    const std::size_t n1 = curve1.size(), n2 = curve2.size();
    if (n1 < 3 || n2 < 3)
        throw std::invalid_argument("gauss_linking_integral: curves too short");
    std::vector<Eigen::Vector3d> t1(n1), t2(n2);
    for (std::size_t i = 0; i < n1; ++i)
        t1[i] = 0.5 * (curve1[(i + 1) % n1] - curve1[(i + n1 - 1) % n1]);
    for (std::size_t j = 0; j < n2; ++j)
        t2[j] = 0.5 * (curve2[(j + 1) % n2] - curve2[(j + n2 - 1) % n2]);

    double total = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const Eigen::Vector3d& p = curve1[i];
        const Eigen::Vector3d& a = t1[i];
        for (std::size_t j = 0; j < n2; ++j) {
            const Eigen::Vector3d d = p - curve2[j];
            const double r2 = d.squaredNorm();
            total += a.cross(t2[j]).dot(d) / (r2 * std::sqrt(r2));
        }
    }
    return total / (4.0 * M_PI);
}

LinkingResult linking_number(
    const std::function<Eigen::Vector3d(double)>& curve1,
    const std::function<Eigen::Vector3d(double)>& curve2, int n_start,
    int n_cap, double residual_tol) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = n_start; n <= n_cap; n *= 2) {
        std::vector<Eigen::Vector3d> c1(n), c2(n);
        for (int i = 0; i < n; ++i) {
            c1[i] = curve1(double(i) / n);
            c2[i] = curve2(double(i) / n);
        }
        const double lk = gauss_linking_integral(c1, c2);
        const double residual = std::abs(lk - std::round(lk));
        if (residual < residual_tol && !std::isnan(prev) &&
            std::abs(lk - prev) < residual_tol)
            return {int(std::round(lk)), residual, n};
        prev = lk;
    }
    throw std::runtime_error(
        "linking_number: quadrature residual above tolerance at sampling cap; "
        "re-run with finer sampling");
}

Stereographic::Stereographic(const Quaternion& pole) {
    pole_ = pole.normalized();
    p_ = pole_.vec4();
    // Gram-Schmidt a basis of the orthogonal complement, then orient it.
    Eigen::Matrix<double, 4, 3> B;
    int filled = 0;
    for (int axis = 0; axis < 4 && filled < 3; ++axis) {
        Eigen::Vector4d w = Eigen::Vector4d::Unit(axis);
        w -= w.dot(p_) * p_;
        for (int k = 0; k < filled; ++k) w -= w.dot(B.col(k)) * B.col(k);
        if (w.norm() > 1e-6) B.col(filled++) = w.normalized();
    }
    if (filled < 3) throw std::logic_error("Stereographic: basis construction");
    Eigen::Matrix4d M;
    M.col(0) = B.col(0);
    M.col(1) = B.col(1);
    M.col(2) = B.col(2);
    M.col(3) = p_;
    if (M.determinant() < 0.0) B.col(2) = -B.col(2);
    b1_ = B.col(0);
    b2_ = B.col(1);
    b3_ = B.col(2);
}

Eigen::Vector3d Stereographic::project(const Quaternion& q) const {
    const Eigen::Vector4d y = q.vec4();
    const double denom = 1.0 - y.dot(p_);
    if (denom < 1e-9)
        throw std::invalid_argument("Stereographic: point at (or near) the pole");
    return Eigen::Vector3d(y.dot(b1_), y.dot(b2_), y.dot(b3_)) / denom;
}

Quaternion Stereographic::select_pole(const std::vector<Quaternion>& avoid) {
    std::vector<Quaternion> candidates = {
        {1, 0, 0, 0}, {-1, 0, 0, 0}, {0, 1, 0, 0}, {0, -1, 0, 0},
        {0, 0, 1, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}, {0, 0, 0, -1}};
    for (int a = -1; a <= 1; a += 2)
        for (int b = -1; b <= 1; b += 2)
            for (int c = -1; c <= 1; c += 2)
                for (int d = -1; d <= 1; d += 2)
                    candidates.push_back(
                        Quaternion(0.5 * a, 0.5 * b, 0.5 * c, 0.5 * d));
    Quaternion best = candidates.front();
    double best_dist = -1.0;
    for (const Quaternion& cand : candidates) {
        double dist = std::numeric_limits<double>::infinity();
        for (const Quaternion& q : avoid)
            dist = std::min(dist, (q - cand).norm());
        if (dist > best_dist) {
            best_dist = dist;
            best = cand;
        }
    }
    return best;
}

}  // namespace reeblab
