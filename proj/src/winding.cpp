#include "reeblab/winding.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace reeblab {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Elliptic: return "Elliptic";
        case Stability::HypPlus: return "HypPlus";
        case Stability::HypMinus: return "HypMinus";
        case Stability::Degenerate: return "Degenerate";
    }
    return "?";
}

Stability classify(const Eigen::Matrix2d& m) {
    if (std::abs(m.determinant() - 1.0) > 1e-6)
        throw std::invalid_argument("classify: determinant is not 1");
    const double tr = m.trace();
    if (std::abs(std::abs(tr) - 2.0) <= 1e-6) return Stability::Degenerate;
    if (std::abs(tr) < 2.0) return Stability::Elliptic;
    return tr > 0.0 ? Stability::HypPlus : Stability::HypMinus;
}

EigenPair monodromy_eigenvalues(const Eigen::Matrix2d& m) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {{(tr + r) / 2.0, 0.0}, {(tr - r) / 2.0, 0.0}};
    }
    const double im = std::sqrt(-disc) / 2.0;
    return {{tr / 2.0, im}, {tr / 2.0, -im}};
}

SymplecticArc make_symplectic_arc(MatrixArc arc) {
    if (arc.s.size() < 2 || arc.s.size() != arc.phi.size())
        throw std::invalid_argument("arc: need matching sample lists");
    if (std::abs(arc.s.front()) > 1e-12 || std::abs(arc.s.back() - 1.0) > 1e-12)
        throw std::invalid_argument("arc: parameter grid must span [0, 1]");
    for (std::size_t i = 1; i < arc.s.size(); ++i)
        if (arc.s[i] <= arc.s[i - 1])
            throw std::invalid_argument("arc: parameter grid not increasing");
    if ((arc.phi.front() - Eigen::Matrix2d::Identity()).norm() > 1e-9)
        throw std::invalid_argument("arc: phi(0) is not the identity");
    for (const auto& m : arc.phi)
        if (std::abs(m.determinant() - 1.0) > 1e-7)
            throw std::invalid_argument("arc: determinant drifts from 1");
    SymplecticArc out;
    static_cast<MatrixArc&>(out) = std::move(arc);
    return out;
}

double winding(const MatrixArc& arc, const Eigen::Vector2d& z) {
    if (z.norm() == 0.0)
        throw std::invalid_argument("winding: direction must be nonzero");
    if (arc.s.size() < 2 || arc.s.size() != arc.phi.size())
        throw std::invalid_argument("winding: malformed arc");
    double total = 0.0;
    Eigen::Vector2d prev = arc.phi.front() * z;
    for (std::size_t i = 1; i < arc.phi.size(); ++i) {
        const Eigen::Vector2d cur = arc.phi[i] * z;
        const double cross = prev.x() * cur.y() - prev.y() * cur.x();
        const double dot = prev.dot(cur);
        const double dtheta = std::atan2(cross, dot);
        if (std::abs(dtheta) >= M_PI / 2.0)
            throw refinement_needed(
                "winding: argument jump >= pi/2 between samples");
        total += dtheta;
        prev = cur;
    }
    return total / (2.0 * M_PI);
}

namespace {

Eigen::Vector2d direction(double alpha) {
    return {std::cos(alpha), std::sin(alpha)};
}

/// Golden-section extremum of Delta over [a, b]; sign = +1 maximizes.
void golden_refine(const MatrixArc& arc, double a, double b, double sign,
                   double& best_val, double& best_arg) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = sign * winding(arc, direction(c));
    double fd = sign * winding(arc, direction(d));
    for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sign * winding(arc, direction(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sign * winding(arc, direction(d));
        }
    }
    const double arg = (fc > fd) ? c : d;
    const double val = sign * std::max(fc, fd);
    if (sign * val > sign * best_val) {
        best_val = val;
        best_arg = arg;
    }
}

}  // namespace

WindingInterval winding_interval(const MatrixArc& arc, int n_angles) {
    // Delta(-z) = Delta(z), so directions are sampled over [0, pi) only and
    // the grid is cyclic with period pi.
    const double dalpha = M_PI / n_angles;
    std::vector<double> vals(n_angles);
    int imin = 0, imax = 0;
    for (int i = 0; i < n_angles; ++i) {
        vals[i] = winding(arc, direction(i * dalpha));
        if (vals[i] < vals[imin]) imin = i;
        if (vals[i] > vals[imax]) imax = i;
    }
    WindingInterval out;
    out.lo = vals[imin];
    out.angle_lo = imin * dalpha;
    out.hi = vals[imax];
    out.angle_hi = imax * dalpha;
    // Refine around the global extremes and around every strict local
    // extremum of the grid (Delta need not be unimodal between grid points).
    for (int i = 0; i < n_angles; ++i) {
        const double prev = vals[(i + n_angles - 1) % n_angles];
        const double next = vals[(i + 1) % n_angles];
        const bool local_max = vals[i] >= prev && vals[i] >= next &&
                               (vals[i] > prev || vals[i] > next);
        const bool local_min = vals[i] <= prev && vals[i] <= next &&
                               (vals[i] < prev || vals[i] < next);
        if (local_max || i == imax)
            golden_refine(arc, (i - 1) * dalpha, (i + 1) * dalpha, +1.0, out.hi,
                          out.angle_hi);
        if (local_min || i == imin)
            golden_refine(arc, (i - 1) * dalpha, (i + 1) * dalpha, -1.0, out.lo,
                          out.angle_lo);
    }
    if (out.length() > 0.5 + 1e-9)
        throw std::logic_error(
            "winding_interval: interval longer than 1/2 (arc resolution bug)");
    return out;
}

int cz_index(const SymplecticArc& arc) {
    const double tr = arc.end().trace();
    if (std::abs(tr - 2.0) <= 1e-6)
        throw std::invalid_argument("cz_index: degenerate arc (trace = 2)");
    const WindingInterval I = winding_interval(arc);
    // Integer containment, endpoints included at the 1e-9 level.
    const double kf = std::floor(I.hi + 1e-9);
    const bool contains_integer = kf >= I.lo - 1e-9;
    // An integer lies in the winding interval exactly when phi(1) has a
    // positive real eigenvalue, i.e. tr >= 2 for a det-1 matrix; disagreement
    // in either direction is an arc-resolution failure, not a data state.
    if (contains_integer) {
        if (tr < 2.0)
            throw std::logic_error(
                "cz_index: interval contains an integer but phi(1) has no "
                "positive eigenvalue (resolution failure)");
        return 2 * int(std::llround(kf));
    }
    if (tr > 2.0)
        throw std::logic_error(
            "cz_index: phi(1) has a positive eigenvalue but no integer lies "
            "in the interval (resolution failure)");
    const int k = int(std::floor(I.lo));
    return 2 * k + 1;
}

bool parity_check(Stability classification, int cz) {
    if (classification == Stability::Degenerate)
        throw std::invalid_argument("parity_check: degenerate record");
    const bool even = (cz % 2) == 0;
    if (classification == Stability::HypPlus) return even;
    return !even;  // elliptic or (-)-hyperbolic must be odd
}

}  // namespace reeblab
