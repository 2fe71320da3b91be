#include "reeblab/contact.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace reeblab {

double lambda0(const Quaternion& q, const Quaternion& zeta) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("lambda0: q is not a unit quaternion");
    if (std::abs(qdot(q, zeta)) > 1e-9 * std::max(1.0, zeta.norm()))
        throw std::invalid_argument("lambda0: zeta is not tangent at q");
    return -qmul(zeta.conjugate(), qmul(Quaternion::i(), q)).w;
}

double dlambda0(const Quaternion& z1, const Quaternion& z2) {
    // 2 (dp1 ^ dq1 + dp2 ^ dq2) with (q1, p1, q2, p2) = (w, x, y, z).
    return 2.0 * ((z1.x * z2.w - z1.w * z2.x) + (z1.z * z2.y - z1.y * z2.z));
}

double liouville(const ConformalMetric& metric, const Eigen::Vector3d& x,
                 const Eigen::Vector3d& v, const Eigen::Vector3d& a,
                 const Eigen::Vector3d& /*b*/) {
    if (std::abs(x.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("liouville: base point is not on S^2");
    if (std::abs(metric.pairing(x, v, v) - 1.0) > 1e-9)
        throw std::invalid_argument("liouville: velocity is not g-unit");
    return metric.pairing(x, v, a);
}

double pullback_residual_F(const Quaternion& q, const Quaternion& zeta) {
    if (std::abs(qdot(q, zeta)) > 1e-9 * std::max(1.0, zeta.norm()))
        throw std::invalid_argument("pullback_residual_F: zeta not tangent");
    const Quaternion jq = qmul(Quaternion::j(), q);
    const Quaternion dx =
        qmul(zeta.conjugate(), jq) + qmul(q.conjugate(), qmul(Quaternion::j(), zeta));
    const Eigen::Vector3d v = rotate_vec(q.normalized(), Eigen::Vector3d::UnitZ());
    const double theta0 = v.dot(dx.vec());  // Theta0 at (x, v) on (dx, .)
    return std::abs(theta0 - 2.0 * lambda0(q, zeta));
}

Eigen::Vector3d frame_base_differential_fd(const Quaternion& q,
                                           const Quaternion& zeta, double h) {
    const Quaternion qp = (q + zeta * h).normalized();
    const Quaternion qm = (q - zeta * h).normalized();
    return (frame(qp).x - frame(qm).x) / (2.0 * h);
}

double pullback_residual_H(const ConformalMetric& metric,
                           const Eigen::Vector3d& x, const Eigen::Vector3d& v,
                           const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    if (std::abs(x.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("pullback_residual_H: (x, v) not g0-unit");
    const double uu = metric.u(x);
    const double s = std::exp(-uu);  // 1/sqrt(f)
    // dH(a, b) = (a, s b - s <grad u, a> v)
    const Eigen::Vector3d vh = s * v;
    const Eigen::Vector3d bh = s * b - s * metric.grad_u(x).dot(a) * v;
    const double lhs = liouville(metric, x, vh, a, bh);
    const double rhs = std::exp(uu) * v.dot(a);  // sqrt(f) Theta0
    return std::abs(lhs - rhs);
}

ContactForm ContactForm::standard() { return constant_multiple(1.0); }

ContactForm ContactForm::constant_multiple(double c) {
    if (c <= 0.0)
        throw std::invalid_argument("ContactForm: multiplier must be positive");
    return ContactForm([c](const Quaternion&) { return c; },
                       [](const Quaternion&, const Quaternion&) { return 0.0; });
}

ContactForm ContactForm::lifted(ConformalMetric metric) {
    auto h = [metric](const Quaternion& q) {
        const Eigen::Vector3d x = rotate_vec(q.normalized(), Eigen::Vector3d::UnitY());
        return 2.0 * std::exp(metric.u(x));
    };
    auto dh = [metric](const Quaternion& q, const Quaternion& zeta) {
        const Quaternion qn = q.normalized();
        const Eigen::Vector3d x = rotate_vec(qn, Eigen::Vector3d::UnitY());
        const Quaternion dxq =
            qmul(zeta.conjugate(), qmul(Quaternion::j(), qn)) +
            qmul(qn.conjugate(), qmul(Quaternion::j(), zeta));
        return 2.0 * std::exp(metric.u(x)) *
               metric.grad_u_ambient(x).dot(dxq.vec());
    };
    return ContactForm(std::move(h), std::move(dh));
}

double ContactForm::value(const Quaternion& q, const Quaternion& zeta) const {
    return h_(q) * lambda0(q, zeta);
}

double ContactForm::two_form(const Quaternion& q, const Quaternion& z1,
                             const Quaternion& z2) const {
    const double l1 = lambda0(q, z1);
    const double l2 = lambda0(q, z2);
    return dh_(q, z1) * l2 - dh_(q, z2) * l1 + h_(q) * dlambda0(z1, z2);
}

Quaternion ContactForm::reeb(const Quaternion& q) const {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("reeb: q is not a unit quaternion");
    const Quaternion qn = q.normalized();
    const Quaternion basis[3] = {qmul(Quaternion::i(), qn),
                                 qmul(Quaternion::j(), qn),
                                 qmul(Quaternion::k(), qn)};
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs(1.0, 0.0, 0.0);
    for (int c = 0; c < 3; ++c) {
        A(0, c) = value(qn, basis[c]);
        A(1, c) = two_form(qn, basis[c], basis[1]);
        A(2, c) = two_form(qn, basis[c], basis[2]);
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible())
        throw std::runtime_error("reeb: singular system (form is not contact)");
    const Eigen::Vector3d ycoef = lu.solve(rhs);
    return basis[0] * ycoef[0] + basis[1] * ycoef[1] + basis[2] * ycoef[2];
}

void ContactForm::contact_frame(const Quaternion& q, Quaternion& e1,
                                Quaternion& e2) const {
    const Quaternion qn = q.normalized();
    const double scale = 1.0 / std::sqrt(2.0 * h_(qn));
    e1 = qmul(Quaternion::k(), qn) * scale;
    e2 = qmul(Quaternion::j(), qn) * scale;
}

Eigen::Vector2d ContactForm::contact_coordinates(const Quaternion& q,
                                                 const Quaternion& zeta) const {
    const Quaternion qn = q.normalized();
    const double scale = std::sqrt(2.0 * h_(qn));
    return {scale * qdot(zeta, qmul(Quaternion::k(), qn)),
            scale * qdot(zeta, qmul(Quaternion::j(), qn))};
}

}  // namespace reeblab
