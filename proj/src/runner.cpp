#include "reeblab/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "reeblab/birkhoff.hpp"
#include "reeblab/contact.hpp"

namespace reeblab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Quaternion random_unit_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    return Quaternion(d(rng), d(rng), d(rng), d(rng)).normalized();
}

Quaternion random_tangent(std::mt19937_64& rng, const Quaternion& q) {
    std::normal_distribution<double> d;
    Quaternion z(d(rng), d(rng), d(rng), d(rng));
    const double c = qdot(z, q);
    return z - q * c;
}

}  // namespace

void ScanReport::write_csv(std::ostream& os) const {
    os << "eps_index,eps,guess_index,guess,status,period,reeb_period,"
          "lift_doubled,trace,classification,cz_index,parity_ok,closure_gap,"
          "det_gap,jacobi_trace,fd_trace,error\n";
    for (const ScanCell& c : rows) {
        os << c.eps_index << "," << fmt(c.eps) << "," << c.guess_index << ","
           << c.guess << ",";
        if (!c.converged) {
            os << "failed,,,,,,,,,,,\"" << c.error << "\"\n";
            continue;
        }
        const ClosedOrbitRecord& r = c.record;
        os << "ok," << fmt(r.period) << "," << fmt(r.reeb_period) << ","
           << (r.lift_doubled ? 1 : 0) << "," << fmt(r.monodromy.trace()) << ","
           << to_string(r.classification) << ","
           << (r.cz_index ? std::to_string(*r.cz_index) : "") << ","
           << (r.cz_index ? (c.parity_ok ? "1" : "0") : "") << ","
           << fmt(r.closure_gap) << "," << fmt(r.det_gap) << ","
           << fmt(r.jacobi_trace) << "," << fmt(r.fd_trace()) << ",\n";
    }
}

ScanReport elliptic_scan(
    const std::map<std::pair<int, int>, double>& family_coefficients,
    const std::vector<double>& eps_grid,
    const std::vector<std::string>& guess_specs, double tol, int threads) {
    if (eps_grid.empty())
        throw std::invalid_argument("elliptic_scan: empty parameter grid");
    if (guess_specs.empty())
        throw std::invalid_argument("elliptic_scan: no guesses");

    struct Job {
        int eps_index, guess_index;
        double eps;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
        for (std::size_t g = 0; g < guess_specs.size(); ++g)
            jobs.push_back({int(i), int(g), eps_grid[i]});

    ScanReport report;
    report.rows.resize(jobs.size());

    auto run_job = [&](std::size_t j) {
        const Job& job = jobs[j];
        ScanCell cell;
        cell.eps_index = job.eps_index;
        cell.eps = job.eps;
        cell.guess_index = job.guess_index;
        cell.guess = guess_specs[job.guess_index];
        try {
            std::map<std::pair<int, int>, double> coef;
            for (const auto& [lm, c] : family_coefficients)
                coef[lm] = job.eps * c;
            const ConformalMetric metric(coef);
            ExperimentConfig helper;
            helper.guess_specs = {cell.guess};
            const PhasePoint guess = helper.parse_guesses(metric)[0];
            FindOrbitOptions fopt;
            fopt.tol = tol;
            ClosedOrbitRecord rec = find_closed(metric, guess, fopt);
            cell.record = rec;
            cell.converged = true;
            if (rec.cz_index) cell.parity_ok = parity_check(rec);
        } catch (const std::exception& e) {
            cell.converged = false;
            cell.error = e.what();
        }
        report.rows[j] = std::move(cell);
    };

    int nthreads = threads > 0 ? threads
                               : int(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = std::min<int>(nthreads, int(jobs.size()));
    if (nthreads <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t j = next.fetch_add(1);
                    if (j >= jobs.size()) return;
                    run_job(j);
                }
            });
        for (auto& th : pool) th.join();
    }

    for (const ScanCell& c : report.rows)
        if (c.converged && c.record.classification == Stability::Elliptic)
            if (!report.first_elliptic_eps || c.eps < *report.first_elliptic_eps)
                report.first_elliptic_eps = c.eps;
    return report;
}

namespace {

int task_identities(const ExperimentConfig& cfg, const std::string& out_dir,
                    std::ostream& log) {
    std::mt19937_64 rng(cfg.seed);
    const ConformalMetric& metric = cfg.metric;

    double worst_F = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Quaternion q = random_unit_quaternion(rng);
        const Quaternion z = random_tangent(rng, q);
        worst_F = std::max(worst_F, pullback_residual_F(q, z));
    }

    std::normal_distribution<double> nd;
    double worst_H = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Eigen::Vector3d x =
            Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized();
        Eigen::Vector3d v(nd(rng), nd(rng), nd(rng));
        v -= v.dot(x) * x;
        v.normalize();
        // tangent to T^1(S^2, g0) at (x, v)
        Eigen::Vector3d a(nd(rng), nd(rng), nd(rng)), b(nd(rng), nd(rng), nd(rng));
        a -= a.dot(x) * x;
        b -= b.dot(v) * v;
        b -= (a.dot(v) + x.dot(b)) * x;
        worst_H = std::max(worst_H, pullback_residual_H(metric, x, v, a, b));
    }

    const ContactForm form = ContactForm::lifted(metric);
    double worst_reeb = 0.0, worst_contact = 1e300;
    for (int i = 0; i < 1000; ++i) {
        const Quaternion q = random_unit_quaternion(rng);
        const Quaternion Y = form.reeb(q);
        const Quaternion jq = qmul(Quaternion::j(), q), kq = qmul(Quaternion::k(), q);
        worst_reeb = std::max(worst_reeb, std::abs(form.value(q, Y) - 1.0));
        worst_reeb = std::max(worst_reeb, std::abs(form.two_form(q, Y, jq)));
        worst_reeb = std::max(worst_reeb, std::abs(form.two_form(q, Y, kq)));
        worst_contact = std::min(worst_contact, std::abs(form.two_form(q, jq, kq)));
    }

    const double gb = metric.total_curvature();
    const double gb_gap = std::abs(gb - 4.0 * M_PI);

    std::ostringstream out;
    out << "max_pullback_residual_F = " << fmt(worst_F) << "\n";
    out << "max_pullback_residual_H = " << fmt(worst_H) << "\n";
    out << "max_reeb_defining_residual = " << fmt(worst_reeb) << "\n";
    out << "min_contact_nondegeneracy = " << fmt(worst_contact) << "\n";
    out << "gauss_bonnet_gap = " << fmt(gb_gap) << "\n";
    write_file_atomic(out_dir + "/identities.txt", out.str());
    log << out.str();

    const bool ok = worst_F < 1e-8 && worst_H < 1e-8 && worst_reeb < 1e-10 &&
                    worst_contact > 0.0 && gb_gap < 1e-6;
    if (!ok) log << "identity thresholds exceeded\n";
    return ok ? 0 : 2;
}

int task_integrate(const ExperimentConfig& cfg, const std::string& out_dir,
                   std::ostream& log) {
    Trajectory traj;
    if (cfg.chart == "geodesic") {
        const PhasePoint p0 = cfg.parse_guesses(cfg.metric).at(0);
        traj = integrate_geodesic(cfg.metric, p0, cfg.horizon, {}, cfg.samples);
    } else {
        const ContactForm form = ContactForm::lifted(cfg.metric);
        traj = integrate_reeb(form, Quaternion::identity(), cfg.horizon, {},
                              cfg.samples);
    }
    std::ostringstream out;
    traj.write_csv(out);
    write_file_atomic(out_dir + "/trajectory.csv", out.str());
    log << "samples = " << traj.t.size()
        << ", max constraint residual = " << fmt(traj.max_residual()) << "\n";
    return traj.max_residual() < 1e-8 ? 0 : 2;
}

int task_find_orbit(const ExperimentConfig& cfg, const std::string& out_dir,
                    std::ostream& log, bool need_cz) {
    const PhasePoint guess = cfg.parse_guesses(cfg.metric).at(0);
    FindOrbitOptions fopt;
    fopt.tol = cfg.tol;
    fopt.compute_self_linking = cfg.with_self_linking;
    ClosedOrbitRecord rec = find_closed(cfg.metric, guess, fopt);
    if (need_cz && !rec.cz_index) {
        log << "orbit is degenerate: no Conley-Zehnder index\n";
        return 2;
    }
    std::ostringstream out;
    rec.save(out);
    write_file_atomic(out_dir + "/orbit.rec", out.str());
    log << "period = " << fmt(rec.period) << ", classification = "
        << to_string(rec.classification);
    if (rec.cz_index) log << ", cz = " << *rec.cz_index;
    log << "\n";
    return 0;
}

int task_birkhoff(const ExperimentConfig& cfg, const std::string& out_dir,
                  std::ostream& log) {
    const PhasePoint guess = cfg.parse_guesses(cfg.metric).at(0);
    FindOrbitOptions fopt;
    fopt.tol = cfg.tol;
    const ClosedOrbitRecord rec = find_closed(cfg.metric, guess, fopt);
    const AnnulusSection section = build_annulus(cfg.metric, rec);

    const int n = cfg.grid;
    std::ostringstream out;
    out << "s,theta,s1,theta1,return_time\n";
    double tmin = 1e300, tmax = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            const double s = section.length() * i / n;
            const double theta = M_PI * j / n;
            const auto r = section.return_map(s, theta);
            tmin = std::min(tmin, r.time);
            tmax = std::max(tmax, r.time);
            out << fmt(s) << "," << fmt(theta) << "," << fmt(r.s) << ","
                << fmt(r.theta) << "," << fmt(r.time) << "\n";
        }
    }
    write_file_atomic(out_dir + "/birkhoff.csv", out.str());
    log << "gamma length = " << fmt(section.length()) << ", return time in ["
        << fmt(tmin) << ", " << fmt(tmax) << "]\n";
    return 0;
}

int task_scan(const ExperimentConfig& cfg, const std::string& out_dir,
              std::ostream& log) {
    const ScanReport report = elliptic_scan(cfg.family_coefficients,
                                            cfg.eps_grid, cfg.guess_specs,
                                            cfg.tol);
    std::ostringstream out;
    report.write_csv(out);
    write_file_atomic(out_dir + "/scan.csv", out.str());

    std::ostringstream meta;
    const auto now = std::chrono::system_clock::now();
    meta << "timestamp_unix = "
         << std::chrono::duration_cast<std::chrono::seconds>(
                now.time_since_epoch())
                .count()
         << "\n";
    meta << "seed = " << cfg.seed << "\n";
    write_file_atomic(out_dir + "/scan_meta.txt", meta.str());

    std::ostringstream summary;
    if (report.first_elliptic_eps)
        summary << "first_elliptic_eps = " << fmt(*report.first_elliptic_eps)
                << "\n";
    else
        summary << "first_elliptic_eps = none\n";
    int converged = 0, elliptic = 0;
    for (const ScanCell& c : report.rows) {
        converged += c.converged ? 1 : 0;
        elliptic += (c.converged &&
                     c.record.classification == Stability::Elliptic)
                        ? 1
                        : 0;
    }
    summary << "converged_cells = " << converged << " / " << report.rows.size()
            << "\n";
    summary << "elliptic_cells = " << elliptic << "\n";
    write_file_atomic(out_dir + "/scan_summary.txt", summary.str());
    log << summary.str();
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   std::ostream& log) {
    try {
        if (cfg.task == "identities") return task_identities(cfg, out_dir, log);
        if (cfg.task == "integrate") return task_integrate(cfg, out_dir, log);
        if (cfg.task == "find-orbit")
            return task_find_orbit(cfg, out_dir, log, false);
        if (cfg.task == "cz") return task_find_orbit(cfg, out_dir, log, true);
        if (cfg.task == "birkhoff") return task_birkhoff(cfg, out_dir, log);
        if (cfg.task == "scan") return task_scan(cfg, out_dir, log);
        log << "unknown task: " << cfg.task << "\n";
        return 1;
    } catch (const config_error& e) {
        log << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        log << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log << "numeric failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace reeblab
