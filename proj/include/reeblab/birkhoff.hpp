#ifndef REEBLAB_BIRKHOFF_HPP
#define REEBLAB_BIRKHOFF_HPP

#include <vector>

#include <Eigen/Core>

#include "reeblab/flows.hpp"
#include "reeblab/metric.hpp"
#include "reeblab/orbits.hpp"

namespace reeblab {

/// Componentwise periodic cubic spline through uniform samples on [0, L).
class PeriodicSpline3 {
public:
    PeriodicSpline3() = default;
    PeriodicSpline3(std::vector<Eigen::Vector3d> samples, double length);

    Eigen::Vector3d value(double s) const;
    Eigen::Vector3d derivative(double s) const;
    double length() const { return length_; }

private:
    std::vector<Eigen::Vector3d> y_, m_;  // values and second derivatives
    double length_ = 0.0, h_ = 0.0;
};

struct AnnulusOptions {
    double theta_margin = 1e-4;     // open-annulus margin away from {0, pi}
    double time_cap = 1000.0;       // return-map flow budget
    int gamma_samples = 2048;       // spline resolution along gamma
    IntegrateOptions integrate{};
};

/// Birkhoff annulus over a simple closed geodesic gamma of a
/// positive-curvature conformal metric: the unit vectors based on gamma
/// pointing to the chosen side, in coordinates (s, theta) with s the
/// g-arclength along gamma and theta in (0, pi) the angle from the
/// gamma-direction.  decode(s, pi/2) is the leftward unit normal frame
/// (x cross t0 side) at arclength s.
class AnnulusSection {
public:
    AnnulusSection(const ConformalMetric& metric, const Trajectory& gamma,
                   const AnnulusOptions& opt = {});

    double length() const { return spline_.length(); }

    /// Chart point -> g-unit tangent vector.  Rejects theta outside the
    /// open band [margin, pi - margin].
    PhasePoint decode(double s, double theta) const;
    /// Inverse chart; the base point must lie on gamma within 1e-6.
    std::pair<double, double> encode(const PhasePoint& p) const;

    struct ReturnResult {
        double s, theta;
        double time;
    };

    /// Flows the decoded point to its next crossing of the annulus in the
    /// given time direction (+1 forward, -1 backward); crossing refined by
    /// bisection to 1e-10.  Throws on timeout (cannot happen for positive
    /// curvature; treated as a bug indicator).
    ReturnResult return_map(double s, double theta, int direction = +1) const;

    /// det of the central-difference Jacobian of the forward return map,
    /// weighted by the invariant-density ratio sin(theta')/sin(theta).
    /// Equals 1 for an area-preserving return map.
    double area_jacobian(double s, double theta, double fd_step = 3e-4) const;

    /// Invariant chart density sin(theta) (s is arclength, speed factor 1).
    double invariant_density(double /*s*/, double theta) const {
        return std::sin(theta);
    }

    /// Total invariant area of the annulus on an n x n midpoint grid.
    double invariant_area(int n) const;

    Eigen::Vector3d gamma(double s) const;
    Eigen::Vector3d tangent0(double s) const;  // g0-unit tangent
    Eigen::Vector3d normal0(double s) const;   // x cross t0, the + side

private:
    const ConformalMetric& metric_;
    AnnulusOptions opt_;
    PeriodicSpline3 spline_;
};

/// Checks the positive-curvature hypothesis on a 256-point sphere sample
/// and simplicity of gamma on a dense parameter sample (tolerance 1e-6),
/// then builds the section.
AnnulusSection build_annulus(const ConformalMetric& metric,
                             const Trajectory& gamma,
                             const AnnulusOptions& opt = {});
AnnulusSection build_annulus(const ConformalMetric& metric,
                             const ClosedOrbitRecord& gamma,
                             const AnnulusOptions& opt = {});

}  // namespace reeblab

#endif
