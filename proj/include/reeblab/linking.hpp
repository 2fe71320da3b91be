#ifndef REEBLAB_LINKING_HPP
#define REEBLAB_LINKING_HPP

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "reeblab/quaternion.hpp"

namespace reeblab {

/// Gauss linking integral of two disjoint closed polyline-sampled curves in
/// R^3 (node-sampled product trapezoid with periodic central-difference
/// tangents).  Exact linking is the nearest integer for sufficiently fine
/// sampling.
double gauss_linking_integral(const std::vector<Eigen::Vector3d>& curve1,
                              const std::vector<Eigen::Vector3d>& curve2);

/// Rounds the Gauss integral to an integer, escalating the sampling until
/// the integer residual is below `residual_tol` and two consecutive
/// resolutions agree (Richardson check).  The curves are given as smooth
/// closed paths sampled by the callables on [0, 1).  Throws if the residual
/// target is not met at the sampling cap.
struct LinkingResult {
    int linking = 0;
    double residual = 0.0;   // |integral - nearest integer|
    int samples = 0;         // per-curve sample count actually used
};

LinkingResult linking_number(
    const std::function<Eigen::Vector3d(double)>& curve1,
    const std::function<Eigen::Vector3d(double)>& curve2,
    int n_start = 2048, int n_cap = 32768, double residual_tol = 0.05);

/// Stereographic chart of S^3 minus a pole, with a positively oriented
/// orthonormal basis of the pole's orthogonal complement
/// (det[b1, b2, b3, pole] = +1), so linking numbers in the chart equal
/// linking numbers in S^3 with its standard orientation.
class Stereographic {
public:
    explicit Stereographic(const Quaternion& pole);

    Eigen::Vector3d project(const Quaternion& q) const;
    const Quaternion& pole() const { return pole_; }

    /// Pole on S^3 maximizing the minimum distance to the given points,
    /// over a fixed candidate set.
    static Quaternion select_pole(const std::vector<Quaternion>& avoid);

private:
    Quaternion pole_;
    Eigen::Vector4d b1_, b2_, b3_, p_;
};

}  // namespace reeblab

#endif
