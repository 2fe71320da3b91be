#include "reeblab/birkhoff.hpp"

#include <cmath>
#include <stdexcept>

namespace reeblab {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Solves the cyclic tridiagonal system (1, 4, 1) m = r of the periodic
/// cubic spline by the Sherman-Morrison splitting.
std::vector<double> solve_cyclic_141(const std::vector<double>& r) {
    const int n = int(r.size());
    auto solve_tri = [n](const std::vector<double>& rhs, double b0, double bn) {
        // tridiagonal (1, 4, 1) with modified first/last diagonal entries
        std::vector<double> c(n), d(n), x(n);
        double beta = b0;
        c[0] = 1.0 / beta;
        d[0] = rhs[0] / beta;
        for (int i = 1; i < n; ++i) {
            const double diag = (i == n - 1) ? bn : 4.0;
            beta = diag - c[i - 1];
            c[i] = 1.0 / beta;
            d[i] = (rhs[i] - d[i - 1]) / beta;
        }
        x[n - 1] = d[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
        return x;
    };
    // A = T + u v^T with u = (gamma, 0, ..., 0, 1)^T, v = (1, 0, ..., 0,
    // gamma)^T capturing the cyclic corners; gamma = 1 works for (1,4,1).
    const double gamma = 1.0;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const double b0 = 4.0 - gamma, bn = 4.0 - 1.0 / gamma;
    const std::vector<double> y = solve_tri(r, b0, bn);
    const std::vector<double> z = solve_tri(u, b0, bn);
    const double vy = y[0] + gamma * y[n - 1];
    const double vz = 1.0 + z[0] + gamma * z[n - 1];
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = y[i] - vy / vz * z[i];
    return x;
}

}  // namespace

PeriodicSpline3::PeriodicSpline3(std::vector<Eigen::Vector3d> samples,
                                 double length)
    : y_(std::move(samples)), length_(length) {
    const int n = int(y_.size());
    if (n < 8) throw std::invalid_argument("PeriodicSpline3: too few samples");
    h_ = length_ / n;
    m_.resize(n);
    for (int c = 0; c < 3; ++c) {
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            const double ym = y_[(i + n - 1) % n][c], y0 = y_[i][c],
                         yp = y_[(i + 1) % n][c];
            rhs[i] = 6.0 * (ym - 2.0 * y0 + yp) / (h_ * h_);
        }
        const std::vector<double> m = solve_cyclic_141(rhs);
        for (int i = 0; i < n; ++i) m_[i][c] = m[i];
    }
}

Eigen::Vector3d PeriodicSpline3::value(double s) const {
    const int n = int(y_.size());
    double sm = std::fmod(s, length_);
    if (sm < 0.0) sm += length_;
    int i = int(sm / h_);
    if (i >= n) i = n - 1;
    const double tau = (sm - i * h_) / h_;
    const int j = (i + 1) % n;
    const double a = 1.0 - tau;
    return a * y_[i] + tau * y_[j] +
           (h_ * h_ / 6.0) *
               ((a * a * a - a) * m_[i] + (tau * tau * tau - tau) * m_[j]);
}

Eigen::Vector3d PeriodicSpline3::derivative(double s) const {
    const int n = int(y_.size());
    double sm = std::fmod(s, length_);
    if (sm < 0.0) sm += length_;
    int i = int(sm / h_);
    if (i >= n) i = n - 1;
    const double tau = (sm - i * h_) / h_;
    const int j = (i + 1) % n;
    const double a = 1.0 - tau;
    return (y_[j] - y_[i]) / h_ +
           (h_ / 6.0) *
               ((-3.0 * a * a + 1.0) * m_[i] + (3.0 * tau * tau - 1.0) * m_[j]);
}

AnnulusSection::AnnulusSection(const ConformalMetric& metric,
                               const Trajectory& gamma,
                               const AnnulusOptions& opt)
    : metric_(metric), opt_(opt) {
    if (gamma.chart != Chart::T1S2 || gamma.points.size() < 2)
        throw std::invalid_argument("AnnulusSection: surface-chart orbit required");
    if (gamma.closure_gap() > 1e-8)
        throw std::invalid_argument("AnnulusSection: gamma is not closed");
    const double L = gamma.duration();  // unit g-speed: duration = arclength
    const Trajectory dense = integrate_geodesic(
        metric, gamma.points.front(), L, opt.integrate, opt.gamma_samples);
    std::vector<Eigen::Vector3d> pts(opt.gamma_samples);
    for (int i = 0; i < opt.gamma_samples; ++i) pts[i] = dense.points[i].x;
    spline_ = PeriodicSpline3(std::move(pts), L);
}

Eigen::Vector3d AnnulusSection::gamma(double s) const {
    return spline_.value(s).normalized();
}

Eigen::Vector3d AnnulusSection::tangent0(double s) const {
    const Eigen::Vector3d x = gamma(s);
    Eigen::Vector3d t = spline_.derivative(s);
    t -= t.dot(x) * x;
    return t.normalized();
}

Eigen::Vector3d AnnulusSection::normal0(double s) const {
    return gamma(s).cross(tangent0(s));
}

PhasePoint AnnulusSection::decode(double s, double theta) const {
    if (theta < opt_.theta_margin || theta > M_PI - opt_.theta_margin)
        throw std::invalid_argument(
            "AnnulusSection: theta outside the open annulus band");
    const Eigen::Vector3d x = gamma(s);
    const Eigen::Vector3d dir =
        std::cos(theta) * tangent0(s) + std::sin(theta) * normal0(s);
    return PhasePoint::surface(metric_, x, dir);
}

std::pair<double, double> AnnulusSection::encode(const PhasePoint& p) const {
    if (p.chart != Chart::T1S2)
        throw std::invalid_argument("AnnulusSection: surface-chart point required");
    const double L = spline_.length();
    const int n = opt_.gamma_samples;
    // coarse nearest sample, then golden-section refinement
    double best = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double s = L * i / n;
        const double d = (p.x - spline_.value(s)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = s;
        }
    }
    double a = best - L / n, b = best + L / n;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = (p.x - gamma(c)).squaredNorm();
    double fd = (p.x - gamma(d)).squaredNorm();
    for (int it = 0; it < 90 && (b - a) > 1e-14; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = (p.x - gamma(c)).squaredNorm();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = (p.x - gamma(d)).squaredNorm();
        }
    }
    double s = 0.5 * (a + b);
    s = std::fmod(s, L);
    if (s < 0.0) s += L;
    if ((p.x - gamma(s)).norm() > 1e-6)
        throw std::invalid_argument("AnnulusSection: base point is not on gamma");
    const Eigen::Vector3d vhat = p.v.normalized();
    const double theta = std::atan2(vhat.dot(normal0(s)), vhat.dot(tangent0(s)));
    return {s, theta};
}

AnnulusSection::ReturnResult AnnulusSection::return_map(double s, double theta,
                                                        int direction) const {
    const PhasePoint p = decode(s, theta);
    Vec6 y0;
    y0 << p.x, p.v;

    const double L = spline_.length();
    const int n = opt_.gamma_samples;
    auto level = [&](double, const Vec6& y) {
        const Eigen::Vector3d x = y.head<3>();
        // nearest gamma sample, then the signed normal-field distance
        int ibest = 0;
        double dbest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; i += 8) {
            const double d = (x - spline_.value(L * i / n)).squaredNorm();
            if (d < dbest) {
                dbest = d;
                ibest = i;
            }
        }
        const double sb = L * ibest / n;
        return (x - gamma(sb)).dot(normal0(sb));
    };

    AdaptiveRk<6> rk(
        [this](double, const Vec6& y, Vec6& dy) {
            detail::geodesic_rhs(metric_, y, dy);
        },
        opt_.integrate,
        [this](Vec6& y) { detail::geodesic_project(metric_, y); });
    rk.set_state(0.0, y0);
    typename AdaptiveRk<6>::CrossingOptions copt;
    copt.direction = direction >= 0 ? +1 : -1;
    copt.refine_tol = 1e-10;
    copt.t_settle = 1e-3;
    const double cap = direction >= 0 ? opt_.time_cap : -opt_.time_cap;
    // genuine crossings put the base point on gamma, i.e. within half a
    // coarse-grid spacing of some probe sample (with margin)
    const double accept_dist = 2.0 * 8.0 * L / n;
    const bool found = rk.advance_to_crossing(level, cap, copt, [&](double, const Vec6& y) {
        const Eigen::Vector3d x = y.head<3>();
        double dbest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; i += 8)
            dbest = std::min(dbest, (x - spline_.value(L * i / n)).squaredNorm());
        return dbest < accept_dist * accept_dist;
    });
    if (!found)
        throw std::runtime_error(
            "AnnulusSection: no return before the time cap (bug indicator for "
            "positive curvature)");
    PhasePoint out;
    out.chart = Chart::T1S2;
    out.x = rk.state().head<3>();
    out.v = rk.state().tail<3>();
    const auto [s1, th1] = encode(out);
    return {s1, th1, std::abs(rk.time())};
}

double AnnulusSection::area_jacobian(double s, double theta,
                                     double fd_step) const {
    const double L = spline_.length();
    if (theta - fd_step < opt_.theta_margin ||
        theta + fd_step > M_PI - opt_.theta_margin)
        throw std::invalid_argument(
            "area_jacobian: finite-difference stencil leaves the open annulus");
    auto wrap = [L](double ds) {
        ds = std::fmod(ds, L);
        if (ds > L / 2) ds -= L;
        if (ds < -L / 2) ds += L;
        return ds;
    };
    const ReturnResult rsp = return_map(s + fd_step, theta);
    const ReturnResult rsm = return_map(s - fd_step, theta);
    const ReturnResult rtp = return_map(s, theta + fd_step);
    const ReturnResult rtm = return_map(s, theta - fd_step);
    Eigen::Matrix2d J;
    J(0, 0) = wrap(rsp.s - rsm.s) / (2.0 * fd_step);
    J(1, 0) = (rsp.theta - rsm.theta) / (2.0 * fd_step);
    J(0, 1) = wrap(rtp.s - rtm.s) / (2.0 * fd_step);
    J(1, 1) = (rtp.theta - rtm.theta) / (2.0 * fd_step);

    const ReturnResult r0 = return_map(s, theta);
    return J.determinant() * invariant_density(r0.s, r0.theta) /
           invariant_density(s, theta);
}

double AnnulusSection::invariant_area(int n) const {
    const double L = spline_.length();
    double total = 0.0;
    const double ds = L / n, dth = M_PI / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            total += invariant_density(ds * (i + 0.5), dth * (j + 0.5)) * ds * dth;
    return total;
}

AnnulusSection build_annulus(const ConformalMetric& metric,
                             const Trajectory& gamma,
                             const AnnulusOptions& opt) {
    // positive-curvature hypothesis on a 256-point Fibonacci sphere sample
    const int n_curv = 256;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_curv; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n_curv;
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        const Eigen::Vector3d x(r * std::cos(phi), r * std::sin(phi), z);
        if (metric.curvature(x) <= 0.0)
            throw std::invalid_argument(
                "build_annulus: metric fails the positive-curvature test");
    }
    // simplicity of gamma on a dense parameter sample
    const int m = 512;
    const double L = gamma.duration();
    std::vector<Eigen::Vector3d> pts(m);
    {
        AnnulusSection probe(metric, gamma, opt);
        for (int i = 0; i < m; ++i) pts[i] = probe.gamma(L * i / m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 8; j < m && j - i <= m - 8; ++j)
                if ((pts[i] - pts[j]).norm() < 1e-6)
                    throw std::invalid_argument(
                        "build_annulus: gamma is not simple");
        return probe;
    }
}

AnnulusSection build_annulus(const ConformalMetric& metric,
                             const ClosedOrbitRecord& gamma,
                             const AnnulusOptions& opt) {
    const Trajectory traj = integrate_geodesic(metric, gamma.initial,
                                               gamma.period, opt.integrate, 512);
    Trajectory closed = traj;
    if (closed.closure_gap() > 1e-8)
        throw std::invalid_argument("build_annulus: gamma record does not close");
    return build_annulus(metric, closed, opt);
}

}  // namespace reeblab
