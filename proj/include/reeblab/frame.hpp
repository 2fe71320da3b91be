#ifndef REEBLAB_FRAME_HPP
#define REEBLAB_FRAME_HPP

#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "reeblab/quaternion.hpp"

namespace reeblab {

/// A point of the unit tangent bundle of the round sphere: base point x on
/// S^2 and a unit velocity v orthogonal to it.  The triple [x, v, x cross v]
/// is a rotation matrix, which identifies T^1 S^2 with SO(3).
struct UnitTangent {
    Eigen::Vector3d x;
    Eigen::Vector3d v;

    UnitTangent() : x(0, 0, 1), v(1, 0, 0) {}

    /// Renormalizes small constraint drift (|x|, |v|, <x,v>) on construction;
    /// rejects inputs violating the constraints by more than 1e-6.
    UnitTangent(const Eigen::Vector3d& x_, const Eigen::Vector3d& v_);

    Eigen::Vector3d axis() const { return x.cross(v); }
};

/// The frame map F(q) = [R_q(j), R_q(k), R_q(i)] = [x, v, x cross v],
/// a 2-to-1 covering S^3 -> T^1 S^2 with F(q) = F(-q).
UnitTangent frame(const Quaternion& q);

/// Local inverse of the frame map.  Returns the preimage in {q, -q} closer
/// to `near` when given, otherwise the representative with qdot(q, 1) >= 0
/// (ties broken toward positive leading nonzero component).
Quaternion lift(const UnitTangent& t,
                std::optional<Quaternion> near = std::nullopt);

}  // namespace reeblab

#endif
