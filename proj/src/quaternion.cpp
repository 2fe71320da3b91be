#include "reeblab/quaternion.hpp"

#include <ostream>
#include <stdexcept>

namespace reeblab {

Quaternion qmul(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quaternion rotate(const Quaternion& q, const Quaternion& x) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("rotate: q is not a unit quaternion");
    if (std::abs(x.w) > 1e-9 * std::max(1.0, x.norm()))
        throw std::invalid_argument("rotate: x is not a pure quaternion");
    return qmul(q.conjugate(), qmul(x, q));
}

Eigen::Vector3d rotate_vec(const Quaternion& q, const Eigen::Vector3d& v) {
    return rotate(q, Quaternion::pure(v)).vec();
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << q.w << " + " << q.x << "i + " << q.y << "j + " << q.z << "k";
}

}  // namespace reeblab
