#ifndef REEBLAB_CONTACT_HPP
#define REEBLAB_CONTACT_HPP

#include <functional>

#include <Eigen/Core>

#include "reeblab/frame.hpp"
#include "reeblab/metric.hpp"
#include "reeblab/quaternion.hpp"

namespace reeblab {

/// Standard contact form on S^3, lambda0(q) . zeta = Re[-conj(zeta) i q]
/// = p1 x - q1 y + p2 z - q2 w in the coordinates q = q1 + p1 i + q2 j + p2 k,
/// zeta = x + y i + z j + w k.  With this normalization the frame map
/// satisfies F* Theta0 = 2 lambda0, lambda0(q)(iq) = -1 and the Reeb field of
/// lambda0 is q -> -iq.  (Note: the common opposite-sign convention
/// 1/2 [q dp - p dq] flips the flow direction; see README.)
/// Requires |q| = 1 and zeta tangent at q within 1e-9.
double lambda0(const Quaternion& q, const Quaternion& zeta);

/// Ambient exterior derivative d lambda0 = 2 (dp1 ^ dq1 + dp2 ^ dq2),
/// evaluated on a pair of 4-vectors.  Constant coefficients.
double dlambda0(const Quaternion& z1, const Quaternion& z2);

/// Liouville form of the metric g = e^{2u} g0 at a g-unit tangent (x, v),
/// applied to a tangent vector zeta = (a, b) of T^1 S^2 (a the base
/// component, b the fiber component): Theta(zeta) = g_x(v, a).
/// Requires g_x(v, v) = 1 within 1e-9.
double liouville(const ConformalMetric& metric, const Eigen::Vector3d& x,
                 const Eigen::Vector3d& v, const Eigen::Vector3d& a,
                 const Eigen::Vector3d& b);

/// |Theta0(dF(zeta)) - 2 lambda0(q)(zeta)| with dF computed analytically,
/// d_q R(j)(zeta) = conj(zeta) j q + conj(q) j zeta.  Identically ~0.
double pullback_residual_F(const Quaternion& q, const Quaternion& zeta);

/// Same differential by central differences with step h (test oracle).
Eigen::Vector3d frame_base_differential_fd(const Quaternion& q,
                                           const Quaternion& zeta,
                                           double h = 1e-5);

/// |Theta(dH(zeta)) - sqrt(f(x)) Theta0(zeta)| at a g0-unit tangent (x, v)
/// with zeta = (a, b) tangent to T^1(S^2, g0), for H(x, v) = (x, v / sqrt f).
double pullback_residual_H(const ConformalMetric& metric,
                           const Eigen::Vector3d& x, const Eigen::Vector3d& v,
                           const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Tight contact form lambda = h * lambda0 on S^3, h > 0 the multiplier.
/// The contact structure ker(lambda) is spanned by {jq, kq} at every q;
/// d lambda(jq, kq) = -2 h(q), so the oriented d-lambda-normalized frame is
/// (kq, jq) / sqrt(2 h(q)).
class ContactForm {
public:
    using Multiplier = std::function<double(const Quaternion&)>;
    /// Directional derivative of the multiplier at q along a tangent zeta.
    using MultiplierDerivative =
        std::function<double(const Quaternion&, const Quaternion&)>;

    ContactForm(Multiplier h, MultiplierDerivative dh)
        : h_(std::move(h)), dh_(std::move(dh)) {}

    /// lambda = lambda0 (h = 1).
    static ContactForm standard();
    static ContactForm constant_multiple(double c);
    /// Lift of the geodesic flow of e^{2u} g0: h(q) = 2 e^{u(R_q(j))}.
    static ContactForm lifted(ConformalMetric metric);

    double multiplier(const Quaternion& q) const { return h_(q); }
    double multiplier_derivative(const Quaternion& q,
                                 const Quaternion& zeta) const {
        return dh_(q, zeta);
    }

    /// lambda(q) . zeta
    double value(const Quaternion& q, const Quaternion& zeta) const;
    /// d lambda (q)(z1, z2) = dh ^ lambda0 + h d lambda0, for tangent z1, z2.
    double two_form(const Quaternion& q, const Quaternion& z1,
                    const Quaternion& z2) const;

    /// The Reeb vector field at q: the unique tangent Y with lambda(Y) = 1
    /// and d lambda(Y, .) = 0, solved as a 3x3 linear system in the tangent
    /// basis {iq, jq, kq}.  Throws if the system is singular (the form is
    /// not contact there).
    Quaternion reeb(const Quaternion& q) const;

    /// Oriented d-lambda-normalized frame (e1, e2) = (kq, jq)/sqrt(2h) of
    /// the contact plane at q; d lambda(e1, e2) = 1.
    void contact_frame(const Quaternion& q, Quaternion& e1, Quaternion& e2) const;

    /// Coordinates of a contact-plane vector in the frame above.
    Eigen::Vector2d contact_coordinates(const Quaternion& q,
                                        const Quaternion& zeta) const;

private:
    Multiplier h_;
    MultiplierDerivative dh_;
};

}  // namespace reeblab

#endif
