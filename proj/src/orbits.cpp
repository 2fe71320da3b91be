#include "reeblab/orbits.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>

namespace reeblab {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 pack(const PhasePoint& p) {
    Vec6 y;
    y << p.x, p.v;
    return y;
}

PhasePoint unpack(const Vec6& y) {
    PhasePoint p;
    p.chart = Chart::T1S2;
    p.x = y.head<3>();
    p.v = y.tail<3>();
    return p;
}

/// Orthonormal basis {s1, s2} of the section: tangent to the constraint
/// manifold at p0 and orthogonal to the flow direction.
void section_basis(const ConformalMetric& metric, const Vec6& y0, Vec6& flow,
                   Vec6& s1, Vec6& s2) {
    detail::geodesic_rhs(metric, y0, flow);
    const Eigen::Vector3d x = y0.head<3>(), v = y0.tail<3>();

    // Constraint gradients of |x|^2, <x,v>, f(x)|v|^2.
    Eigen::Matrix<double, 6, 3> G;
    G.col(0) << x, Eigen::Vector3d::Zero();
    G.col(1) << v, x;
    const double f = metric.f(x);
    G.col(2) << 2.0 * f * metric.grad_u(x) * v.squaredNorm(), 2.0 * f * v;

    // Project the ambient basis onto the orthogonal complement of the three
    // constraint gradients and the flow direction, then keep the two largest
    // independent directions.
    Eigen::Matrix<double, 6, 4> avoid;
    avoid.leftCols<3>() = G;
    avoid.col(3) = flow;
    std::vector<Vec6> basis;
    for (int a = 0; a < 6 && basis.size() < 2; ++a) {
        Vec6 w = Vec6::Unit(a);
        for (int c = 0; c < 4; ++c) {
            const Vec6 g = avoid.col(c).normalized();
            w -= w.dot(g) * g;
        }
        for (const Vec6& b : basis) w -= w.dot(b) * b;
        // re-orthogonalize once for safety
        for (int c = 0; c < 4; ++c) {
            const Vec6 g = avoid.col(c).normalized();
            w -= w.dot(g) * g;
        }
        for (const Vec6& b : basis) w -= w.dot(b) * b;
        if (w.norm() > 0.3) basis.push_back(w.normalized());
    }
    if (basis.size() < 2)
        throw std::runtime_error("find_closed: degenerate section basis");
    s1 = basis[0];
    s2 = basis[1];
}

struct SectionReturn {
    Vec6 y;
    double time;
};

/// First return of the geodesic flow to the section plane through p0
/// (level <y - y0, flow_dir> crossing minus-to-plus within the capture
/// radius).  Throws find_closed_failure on timeout.
SectionReturn section_return(const ConformalMetric& metric, const Vec6& start,
                             const Vec6& y0, const Vec6& flow_dir,
                             const FindOrbitOptions& opt, double residual_now,
                             int iter) {
    AdaptiveRk<6> rk(
        [&metric](double, const Vec6& y, Vec6& dy) {
            detail::geodesic_rhs(metric, y, dy);
        },
        opt.integrate,
        [&metric](Vec6& y) { detail::geodesic_project(metric, y); });
    rk.set_state(0.0, start);
    const Vec6 nrm = flow_dir.normalized();
    typename AdaptiveRk<6>::CrossingOptions copt;
    copt.direction = +1;
    copt.refine_tol = 1e-13;
    copt.t_settle = opt.settle_time;
    const bool found = rk.advance_to_crossing(
        [&](double, const Vec6& y) { return nrm.dot(y - y0); }, opt.t_cap, copt,
        [&](double, const Vec6& y) {
            return (y - y0).norm() < opt.capture_radius;
        });
    if (!found)
        throw find_closed_failure(
            "find_closed: no section return within the time cap",
            residual_now, iter);
    return {rk.state(), rk.time()};
}

}  // namespace

ClosedOrbitRecord find_closed(const ConformalMetric& metric,
                              const PhasePoint& guess,
                              const FindOrbitOptions& opt) {
    PhasePoint p0 = guess.chart == Chart::S3
                        ? lifted_to_surface(metric, guess.q)
                        : PhasePoint::surface(metric, guess.x, guess.v);

    Vec6 y0 = pack(p0), flow, s1, s2;
    detail::geodesic_project(metric, y0);
    section_basis(metric, y0, flow, s1, s2);

    // Newton on the section coordinates of the return map.
    Eigen::Vector2d ab = Eigen::Vector2d::Zero();
    const Vec6 plane_normal = flow.normalized();
    auto chart_point = [&](const Eigen::Vector2d& c) {
        Vec6 y = y0 + c[0] * s1 + c[1] * s2;
        // Alternate the constraint projection with the section-plane
        // projection: each alone biases the chart off the other manifold by
        // O(|c|^2), which would put a floor under the closure gap.
        for (int cycle = 0; cycle < 4; ++cycle) {
            detail::geodesic_project(metric, y);
            y -= (y - y0).dot(plane_normal) * plane_normal;
        }
        detail::geodesic_project(metric, y);
        return y;
    };
    auto coords = [&](const Vec6& y) {
        return Eigen::Vector2d((y - y0).dot(s1), (y - y0).dot(s2));
    };

    double residual = std::numeric_limits<double>::infinity();
    double return_time = 0.0;
    Vec6 y_conv = y0;
    int iterations = 0;
    for (;; ++iterations) {
        const Vec6 y = chart_point(ab);
        const SectionReturn ret =
            section_return(metric, y, y0, flow, opt, residual, iterations);
        residual = (ret.y - y).norm();
        return_time = ret.time;
        y_conv = y;
        if (residual < opt.tol) break;
        if (iterations >= opt.max_iterations)
            throw find_closed_failure(
                "find_closed: Newton did not converge in " +
                    std::to_string(opt.max_iterations) + " iterations",
                residual, iterations);
        // Residuals compare the return against the actual chart point (its
        // coordinates differ from the chart parameter at second order).
        const Eigen::Vector2d r = coords(ret.y) - coords(y);
        Eigen::Matrix2d J;
        const double h = opt.newton_fd_step;
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d cp = ab, cm = ab;
            cp[c] += h;
            cm[c] -= h;
            const Vec6 yp = chart_point(cp), ym = chart_point(cm);
            const Eigen::Vector2d rp =
                coords(section_return(metric, yp, y0, flow, opt, residual,
                                      iterations)
                           .y) -
                coords(yp);
            const Eigen::Vector2d rm =
                coords(section_return(metric, ym, y0, flow, opt, residual,
                                      iterations)
                           .y) -
                coords(ym);
            J.col(c) = (rp - rm) / (2.0 * h);
        }
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
        if (!lu.isInvertible())
            throw find_closed_failure(
                "find_closed: singular Newton system (degenerate return map)",
                residual, iterations);
        ab -= lu.solve(r);
    }

    // Minimal period: test closure at T/k, k = 8..2, take the smallest
    // closing period.
    double T = return_time;
    for (int k = 8; k >= 2; --k) {
        AdaptiveRk<6> rk(
            [&metric](double, const Vec6& y, Vec6& dy) {
                detail::geodesic_rhs(metric, y, dy);
            },
            opt.integrate,
            [&metric](Vec6& y) { detail::geodesic_project(metric, y); });
        rk.set_state(0.0, y_conv);
        rk.advance_to(return_time / k);
        if ((rk.state() - y_conv).norm() < 10.0 * opt.tol) {
            T = return_time / k;
            break;
        }
    }

    ClosedOrbitRecord rec;
    rec.initial = unpack(y_conv);
    rec.period = T;
    rec.closure_gap = residual;
    rec.newton_iterations = iterations;

    // Lift to S^3 and detect double-period closure (the lift of a closed
    // geodesic ends at q0 or -q0).
    rec.lift_q0 = surface_to_lift(metric, rec.initial);
    const ContactForm form = ContactForm::lifted(metric);
    Trajectory reeb1 = integrate_reeb(form, rec.lift_q0, T, opt.integrate, 512);
    const Quaternion qT = reeb1.points.back().q;
    const double gap_plus = (qT - rec.lift_q0).norm();
    const double gap_minus = (qT + rec.lift_q0).norm();
    if (std::min(gap_plus, gap_minus) > 1e-6)
        throw std::runtime_error(
            "find_closed: lifted orbit does not close at either sheet");
    rec.lift_doubled = gap_minus < gap_plus;
    rec.reeb_period = rec.lift_doubled ? 2.0 * T : T;

    Trajectory orbit = rec.lift_doubled
                           ? integrate_reeb(form, rec.lift_q0, rec.reeb_period,
                                            opt.integrate, 1024)
                           : reeb1;
    // Snap the endpoint for the closed-orbit preconditions downstream.
    if (orbit.closure_gap() > 1e-8)
        throw std::runtime_error("find_closed: lifted orbit closure above 1e-8");

    const SymplecticArc arc = integrate_linearized(form, orbit, opt.integrate);
    rec.monodromy = arc.end();
    rec.det_gap = std::abs(rec.monodromy.determinant() - 1.0);
    rec.classification = classify(rec.monodromy);

    IntegrateOptions tight = opt.integrate;
    tight.rtol = std::min(opt.integrate.rtol, 1e-12);
    rec.fd_monodromy = monodromy_fd_reeb(form, rec.lift_q0, rec.reeb_period, tight);

    Trajectory geo = integrate_geodesic(metric, rec.initial, T, opt.integrate, 512);
    if (geo.closure_gap() > 1e-8) geo.points.back() = geo.points.front();
    const Eigen::Matrix2d mj = jacobi_monodromy(metric, geo, opt.integrate);
    rec.jacobi_trace =
        rec.lift_doubled ? (mj * mj).trace() : mj.trace();

    if (opt.compute_cz && rec.classification != Stability::Degenerate) {
        const WindingInterval wi = winding_interval(arc);
        rec.winding_lo = wi.lo;
        rec.winding_hi = wi.hi;
        rec.cz_index = cz_index(arc);
    }
    if (opt.compute_self_linking)
        rec.self_linking =
            self_linking(form, rec.lift_q0, rec.reeb_period, opt.integrate);
    return rec;
}

int self_linking(const ContactForm& form, const Quaternion& q0,
                 double reeb_period, const IntegrateOptions& opt,
                 double push_off) {
    const int n_max = 32768;
    const Trajectory orbit =
        integrate_reeb(form, q0, reeb_period, opt, n_max);
    if (orbit.closure_gap() > 1e-6)
        throw std::invalid_argument("self_linking: orbit is not closed");

    std::vector<Quaternion> push(n_max);
    std::vector<Quaternion> avoid;
    for (int i = 0; i < n_max; ++i) {
        const Quaternion q = orbit.points[i].q;
        const Quaternion z = qmul(Quaternion::j(), q);  // contact-frame section
        push[i] = (q + z * push_off).normalized();
        if (i % 64 == 0) {
            avoid.push_back(q);
            avoid.push_back(push[i]);
        }
    }
    const Stereographic chart(Stereographic::select_pole(avoid));

    auto curve1 = [&](double t) {
        return chart.project(orbit.points[int(std::lround(t * n_max)) % n_max].q);
    };
    auto curve2 = [&](double t) {
        return chart.project(push[int(std::lround(t * n_max)) % n_max]);
    };
    const LinkingResult lk = linking_number(curve1, curve2, 2048, n_max, 0.05);
    return lk.linking;
}

int self_linking(const ContactForm& form, const Trajectory& closed_orbit,
                 const IntegrateOptions& opt, double push_off) {
    if (closed_orbit.chart != Chart::S3 || closed_orbit.points.size() < 2)
        throw std::invalid_argument("self_linking: S3 orbit required");
    if (closed_orbit.closure_gap() > 1e-6)
        throw std::invalid_argument("self_linking: orbit is not closed");
    return self_linking(form, closed_orbit.points.front().q,
                        closed_orbit.duration(), opt, push_off);
}

bool parity_check(const ClosedOrbitRecord& record) {
    if (!record.cz_index)
        throw std::invalid_argument("parity_check: record has no index");
    return parity_check(record.classification, *record.cz_index);
}

namespace {

const char* stability_name(Stability s) { return to_string(s); }

Stability stability_from(const std::string& s) {
    if (s == "Elliptic") return Stability::Elliptic;
    if (s == "HypPlus") return Stability::HypPlus;
    if (s == "HypMinus") return Stability::HypMinus;
    if (s == "Degenerate") return Stability::Degenerate;
    throw std::runtime_error("orbit record: unknown classification " + s);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ClosedOrbitRecord::save(std::ostream& os) const {
    os << "schema_version = " << kSchemaVersion << "\n";
    os << "chart = T1S2\n";
    os << "x = " << fmt(initial.x[0]) << " " << fmt(initial.x[1]) << " "
       << fmt(initial.x[2]) << "\n";
    os << "v = " << fmt(initial.v[0]) << " " << fmt(initial.v[1]) << " "
       << fmt(initial.v[2]) << "\n";
    os << "lift_q0 = " << fmt(lift_q0.w) << " " << fmt(lift_q0.x) << " "
       << fmt(lift_q0.y) << " " << fmt(lift_q0.z) << "\n";
    os << "period = " << fmt(period) << "\n";
    os << "lift_doubled = " << (lift_doubled ? 1 : 0) << "\n";
    os << "reeb_period = " << fmt(reeb_period) << "\n";
    os << "monodromy = " << fmt(monodromy(0, 0)) << " " << fmt(monodromy(0, 1))
       << " " << fmt(monodromy(1, 0)) << " " << fmt(monodromy(1, 1)) << "\n";
    os << "classification = " << stability_name(classification) << "\n";
    os << "cz_index = " << (cz_index ? std::to_string(*cz_index) : "none")
       << "\n";
    os << "self_linking = "
       << (self_linking ? std::to_string(*self_linking) : "none") << "\n";
    os << "winding_interval = " << fmt(winding_lo) << " " << fmt(winding_hi)
       << "\n";
    os << "closure_gap = " << fmt(closure_gap) << "\n";
    os << "det_gap = " << fmt(det_gap) << "\n";
    os << "jacobi_trace = " << fmt(jacobi_trace) << "\n";
    os << "fd_monodromy = " << fmt(fd_monodromy(0, 0)) << " "
       << fmt(fd_monodromy(0, 1)) << " " << fmt(fd_monodromy(1, 0)) << " "
       << fmt(fd_monodromy(1, 1)) << "\n";
    os << "newton_iterations = " << newton_iterations << "\n";
}

void ClosedOrbitRecord::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write orbit record: " + path);
    save(os);
}

ClosedOrbitRecord ClosedOrbitRecord::load(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("orbit record: missing field " + key);
        return it->second;
    };
    if (std::stoi(need("schema_version")) != kSchemaVersion)
        throw std::runtime_error("orbit record: unsupported schema version");

    ClosedOrbitRecord rec;
    {
        std::istringstream ss(need("x"));
        ss >> rec.initial.x[0] >> rec.initial.x[1] >> rec.initial.x[2];
    }
    {
        std::istringstream ss(need("v"));
        ss >> rec.initial.v[0] >> rec.initial.v[1] >> rec.initial.v[2];
    }
    rec.initial.chart = Chart::T1S2;
    {
        std::istringstream ss(need("lift_q0"));
        ss >> rec.lift_q0.w >> rec.lift_q0.x >> rec.lift_q0.y >> rec.lift_q0.z;
    }
    rec.period = std::stod(need("period"));
    rec.lift_doubled = std::stoi(need("lift_doubled")) != 0;
    rec.reeb_period = std::stod(need("reeb_period"));
    {
        std::istringstream ss(need("monodromy"));
        ss >> rec.monodromy(0, 0) >> rec.monodromy(0, 1) >> rec.monodromy(1, 0) >>
            rec.monodromy(1, 1);
    }
    rec.classification = stability_from(need("classification"));
    if (need("cz_index") != "none") rec.cz_index = std::stoi(need("cz_index"));
    if (need("self_linking") != "none")
        rec.self_linking = std::stoi(need("self_linking"));
    {
        std::istringstream ss(need("winding_interval"));
        ss >> rec.winding_lo >> rec.winding_hi;
    }
    rec.closure_gap = std::stod(need("closure_gap"));
    rec.det_gap = std::stod(need("det_gap"));
    rec.jacobi_trace = std::stod(need("jacobi_trace"));
    {
        std::istringstream ss(need("fd_monodromy"));
        ss >> rec.fd_monodromy(0, 0) >> rec.fd_monodromy(0, 1) >>
            rec.fd_monodromy(1, 0) >> rec.fd_monodromy(1, 1);
    }
    rec.newton_iterations = std::stoi(need("newton_iterations"));
    rec.validate();
    return rec;
}

ClosedOrbitRecord ClosedOrbitRecord::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open orbit record: " + path);
    return load(is);
}

void ClosedOrbitRecord::validate() const {
    if (std::abs(monodromy.determinant() - 1.0) > 1e-7)
        throw std::runtime_error("orbit record: monodromy determinant not 1");
    if (classify(monodromy) != classification)
        throw std::runtime_error(
            "orbit record: classification inconsistent with trace");
    if (period <= 0.0 || reeb_period <= 0.0)
        throw std::runtime_error("orbit record: nonpositive period");
    if (std::abs(reeb_period - (lift_doubled ? 2.0 : 1.0) * period) >
        1e-9 * std::max(1.0, period))
        throw std::runtime_error("orbit record: period bookkeeping broken");
    if ((monodromy - fd_monodromy).cwiseAbs().maxCoeff() > 1e-5)
        throw std::runtime_error(
            "orbit record: variational and shooting monodromies disagree");
    if (std::abs(monodromy.trace() - jacobi_trace) > 1e-5)
        throw std::runtime_error(
            "orbit record: monodromy and Jacobi traces disagree");
}

}  // namespace reeblab
