#include "reeblab/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace reeblab {

UnitTangent::UnitTangent(const Eigen::Vector3d& x_, const Eigen::Vector3d& v_) {
    const double nx = x_.norm();
    if (std::abs(nx - 1.0) > 1e-6)
        throw std::invalid_argument("UnitTangent: base point is not on S^2");
    x = x_ / nx;
    Eigen::Vector3d vp = v_ - v_.dot(x) * x;
    if (std::abs(v_.norm() - 1.0) > 1e-6 || std::abs(v_.dot(x)) > 1e-6 ||
        vp.norm() < 0.5)
        throw std::invalid_argument("UnitTangent: velocity is not unit tangent");
    v = vp.normalized();
}

UnitTangent frame(const Quaternion& q) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("frame: q is not a unit quaternion");
    const Quaternion qn = q.normalized();
    return UnitTangent(rotate_vec(qn, Eigen::Vector3d::UnitY()),
                       rotate_vec(qn, Eigen::Vector3d::UnitZ()));
}

Quaternion lift(const UnitTangent& t, std::optional<Quaternion> near) {
    // Matrix of the linear map p -> conj(q) p q on the basis (i, j, k):
    // columns [R_q(i), R_q(j), R_q(k)] = [x cross v, x, v].
    Eigen::Matrix3d M;
    M.col(0) = t.axis();
    M.col(1) = t.x;
    M.col(2) = t.v;

    // Extract r with M p = r p conj(r), then q = conj(r).  Branch on the
    // largest of trace and diagonal entries to avoid cancellation near
    // rotations by pi.
    double w, x, y, z;
    const double tr = M.trace();
    if (tr > M(0, 0) && tr > M(1, 1) && tr > M(2, 2)) {
        const double s = std::sqrt(1.0 + tr) * 2.0;  // s = 4w
        w = 0.25 * s;
        x = (M(2, 1) - M(1, 2)) / s;
        y = (M(0, 2) - M(2, 0)) / s;
        z = (M(1, 0) - M(0, 1)) / s;
    } else if (M(0, 0) > M(1, 1) && M(0, 0) > M(2, 2)) {
        const double s = std::sqrt(1.0 + M(0, 0) - M(1, 1) - M(2, 2)) * 2.0;
        w = (M(2, 1) - M(1, 2)) / s;
        x = 0.25 * s;
        y = (M(0, 1) + M(1, 0)) / s;
        z = (M(0, 2) + M(2, 0)) / s;
    } else if (M(1, 1) > M(2, 2)) {
        const double s = std::sqrt(1.0 - M(0, 0) + M(1, 1) - M(2, 2)) * 2.0;
        w = (M(0, 2) - M(2, 0)) / s;
        x = (M(0, 1) + M(1, 0)) / s;
        y = 0.25 * s;
        z = (M(1, 2) + M(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 - M(0, 0) - M(1, 1) + M(2, 2)) * 2.0;
        w = (M(1, 0) - M(0, 1)) / s;
        x = (M(0, 2) + M(2, 0)) / s;
        y = (M(1, 2) + M(2, 1)) / s;
        z = 0.25 * s;
    }
    Quaternion q = Quaternion(w, x, y, z).conjugate().normalized();

    if (near) {
        if (qdot(q, *near) < 0.0) q = -q;
    } else {
        // Canonical sheet: first nonzero component positive.
        const double c[4] = {q.w, q.x, q.y, q.z};
        for (double ci : c) {
            if (std::abs(ci) > 1e-12) {
                if (ci < 0.0) q = -q;
                break;
            }
        }
    }

    const UnitTangent check = frame(q);
    if ((check.x - t.x).norm() > 1e-8 || (check.v - t.v).norm() > 1e-8)
        throw std::runtime_error("lift: frame inversion failed");
    return q;
}

}  // namespace reeblab
