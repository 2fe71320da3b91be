#ifndef REEBLAB_QUATERNION_HPP
#define REEBLAB_QUATERNION_HPP

#include <cmath>
#include <iosfwd>

#include <Eigen/Core>

namespace reeblab {

/// Element of the quaternion algebra, q = w + x*i + y*j + z*k with the
/// multiplication table i^2 = j^2 = k^2 = -1, ij = k, jk = i, ki = j.
/// Unit quaternions model S^3; pure (w = 0) unit quaternions model S^2.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Quaternion() = default;
    Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
    static Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    /// Pure quaternion from a 3-vector in the (i, j, k) basis.
    static Quaternion pure(const Eigen::Vector3d& v) {
        return {0.0, v.x(), v.y(), v.z()};
    }
    static Quaternion from_vec4(const Eigen::Vector4d& v) {
        return {v[0], v[1], v[2], v[3]};
    }

    Eigen::Vector3d vec() const { return {x, y, z}; }
    Eigen::Vector4d vec4() const { return {w, x, y, z}; }

    double norm_squared() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_squared()); }

    Quaternion conjugate() const { return {w, -x, -y, -z}; }

    Quaternion normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Quaternion operator-() const { return {-w, -x, -y, -z}; }
    Quaternion operator+(const Quaternion& o) const {
        return {w + o.w, x + o.x, y + o.y, z + o.z};
    }
    Quaternion operator-(const Quaternion& o) const {
        return {w - o.w, x - o.x, y - o.y, z - o.z};
    }
    Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
};

inline Quaternion operator*(double s, const Quaternion& q) { return q * s; }

/// Quaternion product per the multiplication table above.
Quaternion qmul(const Quaternion& a, const Quaternion& b);

inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return qmul(a, b);
}

/// Euclidean inner product on R^4 ~ the quaternions; equals Re(a * conj(b)).
inline double qdot(const Quaternion& a, const Quaternion& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// exp(i t) = cos t + i sin t, the one-parameter subgroup through i.
inline Quaternion exp_i(double t) { return {std::cos(t), std::sin(t), 0.0, 0.0}; }

/// Rotation representation R_q(x) = conj(q) * x * q acting on pure
/// quaternions.  Composition runs in reversed order:
/// R_{q1 q2} = R_{q2} o R_{q1}.
/// Throws std::invalid_argument unless |q| = 1 and Re(x) = 0 within 1e-9.
Quaternion rotate(const Quaternion& q, const Quaternion& x);

/// Same rotation applied to a plain 3-vector.
Eigen::Vector3d rotate_vec(const Quaternion& q, const Eigen::Vector3d& v);

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace reeblab

#endif
