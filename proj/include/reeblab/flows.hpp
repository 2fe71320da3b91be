#ifndef REEBLAB_FLOWS_HPP
#define REEBLAB_FLOWS_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "reeblab/contact.hpp"
#include "reeblab/metric.hpp"
#include "reeblab/quaternion.hpp"
#include "reeblab/rk45.hpp"
#include "reeblab/winding.hpp"

namespace reeblab {

enum class Chart { T1S2, S3 };

/// A point of phase space, tagged by chart: either a g-unit tangent vector
/// (x, v) of the surface, or a unit quaternion on S^3.
struct PhasePoint {
    Chart chart = Chart::T1S2;
    Eigen::Vector3d x = Eigen::Vector3d::UnitX();
    Eigen::Vector3d v = Eigen::Vector3d::UnitY();
    Quaternion q = Quaternion::identity();

    /// g-unit tangent from a base point and a direction (renormalized).
    static PhasePoint surface(const ConformalMetric& metric,
                              const Eigen::Vector3d& x,
                              const Eigen::Vector3d& v_direction);
    static PhasePoint sphere3(const Quaternion& q);

    /// Euclidean distance in the ambient chart coordinates.
    double distance(const PhasePoint& other) const;
};

struct Trajectory {
    Chart chart = Chart::T1S2;
    std::vector<double> t;
    std::vector<PhasePoint> points;
    std::vector<double> residual;  // constraint residual per sample

    double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }
    double closure_gap() const {
        return points.empty() ? 0.0 : points.front().distance(points.back());
    }
    double max_residual() const;

    /// CSV dump; columns (in order): t, chart, then x0 x1 x2 v0 v1 v2 for
    /// T1S2 or qw qx qy qz for S3, then residual.
    void write_csv(std::ostream& os) const;
};

/// Conjugacy map from S^3 to the g-unit tangent bundle: q is sent to
/// (R_q(j), e^{-u} R_q(k)).  Its inverse composes the g0-renormalization
/// with the frame lift.
PhasePoint lifted_to_surface(const ConformalMetric& metric, const Quaternion& q);
Quaternion surface_to_lift(const ConformalMetric& metric, const PhasePoint& p,
                           std::optional<Quaternion> near = std::nullopt);

/// Unit-speed geodesic flow of g = e^{2u} g0 in extrinsic coordinates, with
/// post-step projection onto {|x| = 1, <x,v> = 0, g(v,v) = 1}.  Samples at
/// accepted steps, or on a uniform grid of n_samples+1 points when given.
Trajectory integrate_geodesic(const ConformalMetric& metric,
                              const PhasePoint& p0, double T,
                              const IntegrateOptions& opt = {},
                              int n_samples = 0);

/// Integral curve of the Reeb field of `form`, |q| projected to 1 per step.
Trajectory integrate_reeb(const ContactForm& form, const Quaternion& q0,
                          double T, const IntegrateOptions& opt = {},
                          int n_samples = 0);

/// Integrates the Reeb orbit of the lifted form from q0 and the geodesic
/// from the corresponding surface point independently, maps the Reeb
/// trajectory to the surface chart, and returns the max pointwise distance
/// over a uniform grid.
double conjugacy_residual(const ConformalMetric& metric, const Quaternion& q0,
                          double T, const IntegrateOptions& opt = {},
                          int n_samples = 200);

/// Variational flow along a closed Reeb orbit, restricted to the contact
/// structure in its d-lambda-normalized frame: a determinant-one matrix
/// path with phi(0) = I.  The orbit must close within 1e-8.
/// The directional derivative of the Reeb field is taken by central
/// differences of the 0-homogeneous extension (step fd_step).
SymplecticArc integrate_linearized(const ContactForm& form,
                                   const Trajectory& orbit,
                                   const IntegrateOptions& opt = {},
                                   int n_min_samples = 256,
                                   double fd_step = 1e-5);

/// Linearized transport of a single tangent vector along the Reeb flow;
/// returns the endpoint and the transported vector.
std::pair<Quaternion, Quaternion> linearized_transport(
    const ContactForm& form, const Quaternion& q0, const Quaternion& zeta0,
    double T, const IntegrateOptions& opt = {}, double fd_step = 1e-5);

/// Monodromy of the normal Jacobi equation J'' + K(gamma(t)) J = 0 over one
/// period of a closed geodesic (the independent stability oracle).
Eigen::Matrix2d jacobi_monodromy(const ConformalMetric& metric,
                                 const Trajectory& closed_geodesic,
                                 const IntegrateOptions& opt = {});

/// Linearized Poincare-section return map of the Reeb flow over one period,
/// by central differences of the flow through the contact-plane section at
/// q0, expressed in the d-lambda-normalized frame.  Independent of
/// integrate_linearized.
Eigen::Matrix2d monodromy_fd_reeb(const ContactForm& form, const Quaternion& q0,
                                  double period,
                                  const IntegrateOptions& opt = {},
                                  double fd_step = 3e-4);

namespace detail {
/// Geodesic equation right-hand side (shared with the shooting code).
void geodesic_rhs(const ConformalMetric& metric,
                  const Eigen::Matrix<double, 6, 1>& y,
                  Eigen::Matrix<double, 6, 1>& dy);
void geodesic_project(const ConformalMetric& metric,
                      Eigen::Matrix<double, 6, 1>& y);
}  // namespace detail

}  // namespace reeblab

#endif
