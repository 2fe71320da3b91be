#include "reeblab/flows.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace reeblab {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

Quaternion to_quat(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

double surface_residual(const ConformalMetric& metric, const Eigen::Vector3d& x,
                        const Eigen::Vector3d& v) {
    return std::abs(x.norm() - 1.0) + std::abs(x.dot(v)) +
           std::abs(metric.pairing(x, v, v) - 1.0);
}

}  // namespace

PhasePoint PhasePoint::surface(const ConformalMetric& metric,
                               const Eigen::Vector3d& x,
                               const Eigen::Vector3d& v_direction) {
    PhasePoint p;
    p.chart = Chart::T1S2;
    p.x = x.normalized();
    Eigen::Vector3d vt = v_direction - v_direction.dot(p.x) * p.x;
    if (vt.norm() < 1e-12)
        throw std::invalid_argument("PhasePoint: velocity direction degenerate");
    p.v = vt.normalized() * std::exp(-metric.u(p.x));  // g-unit
    return p;
}

PhasePoint PhasePoint::sphere3(const Quaternion& q) {
    if (std::abs(q.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("PhasePoint: q is not a unit quaternion");
    PhasePoint p;
    p.chart = Chart::S3;
    p.q = q.normalized();
    return p;
}

double PhasePoint::distance(const PhasePoint& other) const {
    if (chart != other.chart)
        throw std::invalid_argument("PhasePoint: chart mismatch");
    if (chart == Chart::S3) return (q - other.q).norm();
    return std::sqrt((x - other.x).squaredNorm() + (v - other.v).squaredNorm());
}

double Trajectory::max_residual() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, r);
    return m;
}

void Trajectory::write_csv(std::ostream& os) const {
    if (chart == Chart::T1S2)
        os << "t,chart,x0,x1,x2,v0,v1,v2,residual\n";
    else
        os << "t,chart,qw,qx,qy,qz,residual\n";
    char buf[256];
    for (std::size_t i = 0; i < t.size(); ++i) {
        const PhasePoint& p = points[i];
        if (chart == Chart::T1S2) {
            std::snprintf(buf, sizeof(buf),
                          "%.17g,T1S2,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          t[i], p.x[0], p.x[1], p.x[2], p.v[0], p.v[1], p.v[2],
                          residual[i]);
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g,S3,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          t[i], p.q.w, p.q.x, p.q.y, p.q.z, residual[i]);
        }
        os << buf;
    }
}

PhasePoint lifted_to_surface(const ConformalMetric& metric, const Quaternion& q) {
    const UnitTangent t = frame(q.normalized());
    PhasePoint p;
    p.chart = Chart::T1S2;
    p.x = t.x;
    p.v = t.v * std::exp(-metric.u(t.x));
    return p;
}

Quaternion surface_to_lift(const ConformalMetric& metric, const PhasePoint& p,
                           std::optional<Quaternion> near) {
    if (p.chart != Chart::T1S2)
        throw std::invalid_argument("surface_to_lift: surface-chart point required");
    const Eigen::Vector3d v0 = p.v * std::exp(metric.u(p.x));  // g0-unit
    return lift(UnitTangent(p.x, v0), near);
}

namespace detail {

void geodesic_rhs(const ConformalMetric& metric, const Vec6& y, Vec6& dy) {
    const Eigen::Vector3d x = y.head<3>(), v = y.tail<3>();
    const double v2 = v.squaredNorm();
    const Eigen::Vector3d gu = metric.grad_u(x.normalized());
    dy.head<3>() = v;
    dy.tail<3>() = -v2 * x - 2.0 * gu.dot(v) * v + v2 * gu;
}

void geodesic_project(const ConformalMetric& metric, Vec6& y) {
    Eigen::Vector3d x = y.head<3>(), v = y.tail<3>();
    x.normalize();
    v -= v.dot(x) * x;
    v *= std::exp(-metric.u(x)) / v.norm();  // g-unit speed
    y.head<3>() = x;
    y.tail<3>() = v;
}

}  // namespace detail

Trajectory integrate_geodesic(const ConformalMetric& metric,
                              const PhasePoint& p0, double T,
                              const IntegrateOptions& opt, int n_samples) {
    if (p0.chart != Chart::T1S2)
        throw std::invalid_argument("integrate_geodesic: surface-chart point required");
    if (surface_residual(metric, p0.x, p0.v) > 1e-8)
        throw std::invalid_argument("integrate_geodesic: p0 violates constraints");
    if (T < 0.0) throw std::invalid_argument("integrate_geodesic: T must be >= 0");

    AdaptiveRk<6> rk([&metric](double, const Vec6& y, Vec6& dy) {
                         detail::geodesic_rhs(metric, y, dy);
                     },
                     opt,
                     [&metric](Vec6& y) { detail::geodesic_project(metric, y); });
    Vec6 y0;
    y0 << p0.x, p0.v;
    rk.set_state(0.0, y0);

    Trajectory traj;
    traj.chart = Chart::T1S2;
    auto record = [&](double t, const Vec6& y) {
        PhasePoint p;
        p.chart = Chart::T1S2;
        p.x = y.head<3>();
        p.v = y.tail<3>();
        traj.t.push_back(t);
        traj.points.push_back(p);
        traj.residual.push_back(surface_residual(metric, p.x, p.v));
    };
    record(0.0, y0);
    if (T == 0.0) return traj;
    if (n_samples > 0) {
        for (int i = 1; i <= n_samples; ++i) {
            rk.advance_to(T * i / n_samples);
            record(rk.time(), rk.state());
        }
    } else {
        rk.advance_to(T, [&](double t, const Vec6& y) { record(t, y); });
    }
    return traj;
}

namespace {

struct ReebRhs {
    const ContactForm* form;

    Vec4 operator()(const Vec4& y) const {
        const Quaternion q = to_quat(y).normalized();
        return form->reeb(q).vec4();
    }
};

}  // namespace

Trajectory integrate_reeb(const ContactForm& form, const Quaternion& q0,
                          double T, const IntegrateOptions& opt, int n_samples) {
    if (std::abs(q0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("integrate_reeb: q0 is not a unit quaternion");
    if (T < 0.0) throw std::invalid_argument("integrate_reeb: T must be >= 0");

    const ReebRhs field{&form};
    AdaptiveRk<4> rk([field](double, const Vec4& y, Vec4& dy) { dy = field(y); },
                     opt, [](Vec4& y) { y.normalize(); });
    rk.set_state(0.0, q0.normalized().vec4());

    Trajectory traj;
    traj.chart = Chart::S3;
    auto record = [&](double t, const Vec4& y) {
        traj.t.push_back(t);
        traj.points.push_back(PhasePoint::sphere3(to_quat(y)));
        traj.residual.push_back(std::abs(y.norm() - 1.0));
    };
    record(0.0, q0.normalized().vec4());
    if (T == 0.0) return traj;
    if (n_samples > 0) {
        for (int i = 1; i <= n_samples; ++i) {
            rk.advance_to(T * i / n_samples);
            record(rk.time(), rk.state());
        }
    } else {
        rk.advance_to(T, [&](double t, const Vec4& y) { record(t, y); });
    }
    return traj;
}

double conjugacy_residual(const ConformalMetric& metric, const Quaternion& q0,
                          double T, const IntegrateOptions& opt, int n_samples) {
    if (T == 0.0) return 0.0;
    const ContactForm form = ContactForm::lifted(metric);
    const Trajectory reeb = integrate_reeb(form, q0, T, opt, n_samples);
    const PhasePoint p0 = lifted_to_surface(metric, q0.normalized());
    const Trajectory geo = integrate_geodesic(metric, p0, T, opt, n_samples);
    double worst = 0.0;
    for (int i = 0; i <= n_samples; ++i) {
        const PhasePoint mapped = lifted_to_surface(metric, reeb.points[i].q);
        worst = std::max(worst, mapped.distance(geo.points[i]));
    }
    return worst;
}

namespace {

/// Largest direction swing (radians) of the transition map between
/// consecutive arc samples, probed over a half circle of directions.
double max_sample_swing(const MatrixArc& arc) {
    double worst = 0.0;
    for (std::size_t i = 1; i < arc.phi.size(); ++i) {
        const Eigen::Matrix2d M = arc.phi[i] * arc.phi[i - 1].inverse();
        for (int k = 0; k < 16; ++k) {
            const double a = M_PI * k / 16.0;
            const Eigen::Vector2d v(std::cos(a), std::sin(a));
            const Eigen::Vector2d w = M * v;
            worst = std::max(worst, std::abs(std::atan2(
                                        v.x() * w.y() - v.y() * w.x(), v.dot(w))));
        }
    }
    return worst;
}

}  // namespace

SymplecticArc integrate_linearized(const ContactForm& form,
                                   const Trajectory& orbit,
                                   const IntegrateOptions& opt,
                                   int n_min_samples, double fd_step) {
    if (orbit.chart != Chart::S3)
        throw std::invalid_argument("integrate_linearized: S3 orbit required");
    if (orbit.points.size() < 2)
        throw std::invalid_argument("integrate_linearized: empty orbit");
    if (orbit.closure_gap() > 1e-8)
        throw std::invalid_argument("integrate_linearized: orbit is not closed");
    const double T = orbit.duration();
    const Quaternion q0 = orbit.points.front().q;

    const ReebRhs field{&form};
    auto rhs = [&](double, const Vec12& y, Vec12& dy) {
        const Vec4 q = y.head<4>();
        dy.head<4>() = field(q);
        for (int a = 0; a < 2; ++a) {
            const Vec4 d = y.segment<4>(4 + 4 * a);
            const double scale = std::max(1.0, d.norm());
            const Vec4 dh = d * (fd_step / scale);
            dy.segment<4>(4 + 4 * a) =
                (field(q + dh) - field(q - dh)) * (scale / (2.0 * fd_step));
        }
    };
    auto project = [](Vec12& y) {
        y.head<4>().normalize();
        const Vec4 q = y.head<4>();
        for (int a = 0; a < 2; ++a) {
            const Vec4 d = y.segment<4>(4 + 4 * a);
            y.segment<4>(4 + 4 * a) = d - d.dot(q) * q;
        }
    };

    Quaternion e1, e2;
    form.contact_frame(q0, e1, e2);
    Vec12 y0;
    y0 << q0.vec4(), e1.vec4(), e2.vec4();

    // Bisect the sampling until no transported direction can jump by pi/4
    // between samples (unambiguous argument lifting downstream).
    int samples = n_min_samples;
    for (int attempt = 0; attempt < 4; ++attempt, samples *= 2) {
        IntegrateOptions lopt = opt;
        lopt.max_step = T / samples;
        AdaptiveRk<12> rk(rhs, lopt, project);
        rk.set_state(0.0, y0);

        MatrixArc arc;
        auto record = [&](double t, const Vec12& y) {
            const Quaternion q = to_quat(y.head<4>());
            Eigen::Matrix2d m;
            m.col(0) = form.contact_coordinates(q, to_quat(y.segment<4>(4)));
            m.col(1) = form.contact_coordinates(q, to_quat(y.segment<4>(8)));
            arc.s.push_back(t / T);
            arc.phi.push_back(m);
        };
        record(0.0, y0);
        rk.advance_to(T, [&](double t, const Vec12& y) { record(t, y); });
        arc.s.back() = 1.0;  // clip the fp rounding of t/T
        // The initial sample is the identity up to rounding in the frame
        // coordinates; snap it.
        arc.phi.front() = Eigen::Matrix2d::Identity();
        if (max_sample_swing(arc) < M_PI / 4.0)
            return make_symplectic_arc(std::move(arc));
    }
    throw std::runtime_error(
        "integrate_linearized: sampling did not resolve the transported "
        "directions");
}

std::pair<Quaternion, Quaternion> linearized_transport(
    const ContactForm& form, const Quaternion& q0, const Quaternion& zeta0,
    double T, const IntegrateOptions& opt, double fd_step) {
    using Vec8 = Eigen::Matrix<double, 8, 1>;
    const ReebRhs field{&form};
    auto rhs = [&](double, const Vec8& y, Vec8& dy) {
        const Vec4 q = y.head<4>();
        const Vec4 d = y.tail<4>();
        dy.head<4>() = field(q);
        const double scale = std::max(1.0, d.norm());
        const Vec4 dh = d * (fd_step / scale);
        dy.tail<4>() = (field(q + dh) - field(q - dh)) * (scale / (2.0 * fd_step));
    };
    auto project = [](Vec8& y) {
        y.head<4>().normalize();
        const Vec4 q = y.head<4>();
        y.tail<4>() -= y.tail<4>().dot(q) * q;
    };
    Vec8 y0;
    y0 << q0.normalized().vec4(), zeta0.vec4();
    AdaptiveRk<8> rk(rhs, opt, project);
    rk.set_state(0.0, y0);
    rk.advance_to(T);
    return {to_quat(rk.state().head<4>()), to_quat(rk.state().tail<4>())};
}

Eigen::Matrix2d jacobi_monodromy(const ConformalMetric& metric,
                                 const Trajectory& closed_geodesic,
                                 const IntegrateOptions& opt) {
    if (closed_geodesic.chart != Chart::T1S2)
        throw std::invalid_argument("jacobi_monodromy: surface-chart orbit required");
    if (closed_geodesic.points.size() < 2)
        throw std::invalid_argument("jacobi_monodromy: empty trajectory");
    if (closed_geodesic.closure_gap() > 1e-8)
        throw std::invalid_argument("jacobi_monodromy: geodesic is not closed");
    const double T = closed_geodesic.duration();
    const PhasePoint p0 = closed_geodesic.points.front();

    using Vec10 = Eigen::Matrix<double, 10, 1>;
    auto rhs = [&metric](double, const Vec10& y, Vec10& dy) {
        Vec6 g = y.head<6>(), dg;
        detail::geodesic_rhs(metric, g, dg);
        dy.head<6>() = dg;
        const double K = metric.curvature(g.head<3>().normalized());
        // columns of M = [[J1, J2], [J1', J2']]: J'' = -K J
        dy[6] = y[8];
        dy[7] = y[9];
        dy[8] = -K * y[6];
        dy[9] = -K * y[7];
    };
    auto project = [&metric](Vec10& y) {
        Vec6 g = y.head<6>();
        detail::geodesic_project(metric, g);
        y.head<6>() = g;
    };
    Vec10 y0;
    y0 << p0.x, p0.v, 1.0, 0.0, 0.0, 1.0;
    AdaptiveRk<10> rk(rhs, opt, project);
    rk.set_state(0.0, y0);
    rk.advance_to(T);
    Eigen::Matrix2d M;
    M << rk.state()[6], rk.state()[7], rk.state()[8], rk.state()[9];
    return M;
}

Eigen::Matrix2d monodromy_fd_reeb(const ContactForm& form, const Quaternion& q0,
                                  double period, const IntegrateOptions& opt,
                                  double fd_step) {
    Quaternion e1, e2;
    form.contact_frame(q0, e1, e2);
    const Quaternion flow_dir = form.reeb(q0);

    // Section through q0 spanned by the contact plane; crossings detected on
    // the level <p - q0, Y(q0)> and refined by bisection, then the flow
    // derivative is read off in the d-lambda frame.  The return map of this
    // section has derivative exactly d phi_T restricted to the contact
    // plane, because the contact structure is flow invariant.
    const ReebRhs field{&form};
    auto flow_return = [&](const Quaternion& start) {
        AdaptiveRk<4> rk([field](double, const Vec4& y, Vec4& dy) { dy = field(y); },
                         opt, [](Vec4& y) { y.normalize(); });
        rk.set_state(0.0, start.normalized().vec4());
        rk.advance_to(period * 0.9);
        typename AdaptiveRk<4>::CrossingOptions copt;
        copt.direction = +1;
        copt.refine_tol = 1e-13;
        const Vec4 dir = flow_dir.vec4().normalized();
        const Vec4 base = q0.vec4();
        const bool ok = rk.advance_to_crossing(
            [&](double, const Vec4& y) { return dir.dot(y - base); },
            period * 1.5, copt);
        if (!ok)
            throw std::runtime_error("monodromy_fd_reeb: no section return");
        return to_quat(rk.state());
    };

    Eigen::Matrix2d M;
    const Quaternion legs[2] = {e1, e2};
    for (int a = 0; a < 2; ++a) {
        const Quaternion qp = (q0 + legs[a] * fd_step).normalized();
        const Quaternion qm = (q0 - legs[a] * fd_step).normalized();
        const Quaternion rp = flow_return(qp);
        const Quaternion rm = flow_return(qm);
        const Quaternion diff = (rp - rm) * (1.0 / (2.0 * fd_step));
        M.col(a) = form.contact_coordinates(q0, diff);
    }
    return M;
}

}  // namespace reeblab
