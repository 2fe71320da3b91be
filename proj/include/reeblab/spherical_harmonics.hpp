#ifndef REEBLAB_SPHERICAL_HARMONICS_HPP
#define REEBLAB_SPHERICAL_HARMONICS_HPP

#include <vector>

#include <Eigen/Core>

namespace reeblab {

/// Homogeneous trivariate polynomial, stored as a flat monomial list.
class TriPoly {
public:
    struct Monomial {
        int a, b, c;  // exponents of x, y, z
        double coef;
    };

    TriPoly() = default;
    explicit TriPoly(std::vector<Monomial> terms) : terms_(std::move(terms)) {}

    static TriPoly constant(double c) { return TriPoly({{0, 0, 0, c}}); }

    const std::vector<Monomial>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    double eval(const Eigen::Vector3d& p) const;
    Eigen::Vector3d gradient(const Eigen::Vector3d& p) const;

    TriPoly operator+(const TriPoly& o) const;
    TriPoly operator*(const TriPoly& o) const;
    TriPoly operator*(double s) const;

    /// d/dx, d/dy or d/dz by axis index.
    TriPoly derivative(int axis) const;

    /// Collects equal exponent triples and drops zero coefficients.
    TriPoly simplified() const;

private:
    std::vector<Monomial> terms_;
};

/// Real spherical harmonic Y_{l,m}, orthonormal over the unit sphere
/// (integral of Y^2 equals 1), represented as the degree-l homogeneous
/// harmonic polynomial whose restriction to S^2 is Y_{l,m}.  Positive m
/// carries cos(m phi), negative m carries sin(|m| phi); no Condon-Shortley
/// phase.  Requires 0 <= |m| <= l.
TriPoly real_solid_harmonic(int l, int m);

}  // namespace reeblab

#endif
