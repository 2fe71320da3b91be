#ifndef REEBLAB_METRIC_HPP
#define REEBLAB_METRIC_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "reeblab/spherical_harmonics.hpp"

namespace reeblab {

/// Conformal metric g = e^{2u} g0 on S^2, where g0 is the round metric of
/// curvature +1 and u is a finite real spherical-harmonic expansion
/// u = sum c_{l,m} Y_{l,m}.  The conformal factor f = e^{2u} is positive by
/// construction, and u, its tangential gradient and its g0-Laplacian are
/// evaluated analytically from the expansion.
class ConformalMetric {
public:
    static constexpr int kDefaultDegreeCap = 8;

    /// Round metric (u = 0).
    ConformalMetric() = default;

    /// Coefficient map keyed by (l, m); degrees above `degree_cap` rejected.
    explicit ConformalMetric(const std::map<std::pair<int, int>, double>& coefficients,
                             int degree_cap = kDefaultDegreeCap);

    const std::map<std::pair<int, int>, double>& coefficients() const {
        return coefficients_;
    }
    bool is_round() const { return terms_.empty(); }

    double u(const Eigen::Vector3d& x) const;
    /// e^{2u(x)}
    double f(const Eigen::Vector3d& x) const;
    /// Tangential (g0-)gradient of u at x on S^2.
    Eigen::Vector3d grad_u(const Eigen::Vector3d& x) const;
    /// Ambient gradient of the harmonic-polynomial extension of u.
    Eigen::Vector3d grad_u_ambient(const Eigen::Vector3d& x) const;
    /// g0-Laplacian of u at x, from Delta Y_{l,m} = -l(l+1) Y_{l,m}.
    double laplacian_u(const Eigen::Vector3d& x) const;

    /// Gauss curvature K = e^{-2u} (1 - Delta u).
    double curvature(const Eigen::Vector3d& x) const;

    /// Metric pairing g_x(a, b) = e^{2u(x)} <a, b> for tangent vectors.
    double pairing(const Eigen::Vector3d& x, const Eigen::Vector3d& a,
                   const Eigen::Vector3d& b) const {
        return f(x) * a.dot(b);
    }

    /// Total curvature integral over S^2 (Gauss-Bonnet check value, 4 pi),
    /// by Gauss-Legendre x trapezoid product quadrature.
    double total_curvature(int n_polar = 64, int n_azimuth = 128) const;

    /// Descriptor file: lines "(l,m) <value>", '#' comments allowed.  Values
    /// with at most 17 significant decimal digits round-trip exactly.
    static ConformalMetric load(std::istream& in, int degree_cap = kDefaultDegreeCap);
    static ConformalMetric load_file(const std::string& path,
                                     int degree_cap = kDefaultDegreeCap);
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;

private:
    struct Term {
        int l;
        double coef;
        TriPoly poly;
        TriPoly dx, dy, dz;
    };

    std::map<std::pair<int, int>, double> coefficients_;
    std::vector<Term> terms_;
};

}  // namespace reeblab

#endif
