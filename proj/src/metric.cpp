#include "reeblab/metric.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace reeblab {

namespace {

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1],
/// by Newton iteration on the Legendre polynomial.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        nodes[i] = t;
        weights[i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
}

}  // namespace

ConformalMetric::ConformalMetric(
    const std::map<std::pair<int, int>, double>& coefficients, int degree_cap)
    : coefficients_(coefficients) {
    for (const auto& [lm, c] : coefficients_) {
        const auto [l, m] = lm;
        if (l < 0 || l > degree_cap || std::abs(m) > l)
            throw std::invalid_argument(
                "ConformalMetric: coefficient index out of range");
        if (c == 0.0) continue;
        Term t;
        t.l = l;
        t.coef = c;
        t.poly = real_solid_harmonic(l, m);
        t.dx = t.poly.derivative(0);
        t.dy = t.poly.derivative(1);
        t.dz = t.poly.derivative(2);
        terms_.push_back(std::move(t));
    }
}

double ConformalMetric::u(const Eigen::Vector3d& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * t.poly.eval(x);
    return s;
}

double ConformalMetric::f(const Eigen::Vector3d& x) const {
    return std::exp(2.0 * u(x));
}

Eigen::Vector3d ConformalMetric::grad_u_ambient(const Eigen::Vector3d& x) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& t : terms_) {
        g.x() += t.coef * t.dx.eval(x);
        g.y() += t.coef * t.dy.eval(x);
        g.z() += t.coef * t.dz.eval(x);
    }
    return g;
}

Eigen::Vector3d ConformalMetric::grad_u(const Eigen::Vector3d& x) const {
    const Eigen::Vector3d g = grad_u_ambient(x);
    return g - g.dot(x) * x;
}

double ConformalMetric::laplacian_u(const Eigen::Vector3d& x) const {
    double s = 0.0;
    for (const auto& t : terms_)
        s -= t.coef * double(t.l * (t.l + 1)) * t.poly.eval(x);
    return s;
}

double ConformalMetric::curvature(const Eigen::Vector3d& x) const {
    if (std::abs(x.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("curvature: x is not on S^2");
    return std::exp(-2.0 * u(x)) * (1.0 - laplacian_u(x));
}

double ConformalMetric::total_curvature(int n_polar, int n_azimuth) const {
    std::vector<double> mu, wmu;
    gauss_legendre(n_polar, mu, wmu);
    double total = 0.0;
    const double dphi = 2.0 * M_PI / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double c = mu[i], s = std::sqrt(1.0 - c * c);
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = dphi * j;
            const Eigen::Vector3d x(s * std::cos(phi), s * std::sin(phi), c);
            // K dA_g = K e^{2u} dA_0
            total += wmu[i] * dphi * curvature(x) * f(x);
        }
    }
    return total;
}

ConformalMetric ConformalMetric::load(std::istream& in, int degree_cap) {
    std::map<std::pair<int, int>, double> coef;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        char lp, comma, rp;
        int l, m;
        double value;
        ls >> std::ws;
        if (ls.eof()) continue;
        if (!(ls >> lp >> l >> comma >> m >> rp >> value) || lp != '(' ||
            comma != ',' || rp != ')') {
            throw std::runtime_error("metric descriptor: parse error at line " +
                                     std::to_string(lineno));
        }
        if (coef.count({l, m}))
            throw std::runtime_error("metric descriptor: duplicate key at line " +
                                     std::to_string(lineno));
        coef[{l, m}] = value;
    }
    return ConformalMetric(coef, degree_cap);
}

ConformalMetric ConformalMetric::load_file(const std::string& path,
                                           int degree_cap) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metric descriptor: " + path);
    return load(in, degree_cap);
}

void ConformalMetric::save(std::ostream& out) const {
    for (const auto& [lm, c] : coefficients_) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "(%d,%d) %.17g", lm.first, lm.second, c);
        out << buf << "\n";
    }
}

void ConformalMetric::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metric descriptor: " + path);
    save(out);
}

}  // namespace reeblab
