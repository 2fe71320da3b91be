#include "reeblab/spherical_harmonics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace reeblab {

namespace {

double ipow(double v, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= v;
    return r;
}

}  // namespace

double TriPoly::eval(const Eigen::Vector3d& p) const {
    double s = 0.0;
    for (const auto& m : terms_)
        s += m.coef * ipow(p.x(), m.a) * ipow(p.y(), m.b) * ipow(p.z(), m.c);
    return s;
}

Eigen::Vector3d TriPoly::gradient(const Eigen::Vector3d& p) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& m : terms_) {
        const double xa = ipow(p.x(), m.a), yb = ipow(p.y(), m.b),
                     zc = ipow(p.z(), m.c);
        if (m.a > 0) g.x() += m.coef * m.a * ipow(p.x(), m.a - 1) * yb * zc;
        if (m.b > 0) g.y() += m.coef * m.b * xa * ipow(p.y(), m.b - 1) * zc;
        if (m.c > 0) g.z() += m.coef * m.c * xa * yb * ipow(p.z(), m.c - 1);
    }
    return g;
}

TriPoly TriPoly::operator+(const TriPoly& o) const {
    std::vector<Monomial> t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return TriPoly(std::move(t)).simplified();
}

TriPoly TriPoly::operator*(const TriPoly& o) const {
    std::vector<Monomial> t;
    t.reserve(terms_.size() * o.terms_.size());
    for (const auto& m1 : terms_)
        for (const auto& m2 : o.terms_)
            t.push_back({m1.a + m2.a, m1.b + m2.b, m1.c + m2.c,
                         m1.coef * m2.coef});
    return TriPoly(std::move(t)).simplified();
}

TriPoly TriPoly::operator*(double s) const {
    std::vector<Monomial> t = terms_;
    for (auto& m : t) m.coef *= s;
    return TriPoly(std::move(t));
}

TriPoly TriPoly::derivative(int axis) const {
    std::vector<Monomial> t;
    for (const auto& m : terms_) {
        Monomial d = m;
        int* e = axis == 0 ? &d.a : axis == 1 ? &d.b : &d.c;
        if (*e == 0) continue;
        d.coef *= *e;
        --*e;
        t.push_back(d);
    }
    return TriPoly(std::move(t));
}

TriPoly TriPoly::simplified() const {
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& m : terms_) acc[{m.a, m.b, m.c}] += m.coef;
    std::vector<Monomial> t;
    for (const auto& [key, coef] : acc)
        if (coef != 0.0)
            t.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                         coef});
    return TriPoly(std::move(t));
}

TriPoly real_solid_harmonic(int l, int m) {
    if (l < 0 || std::abs(m) > l)
        throw std::invalid_argument("real_solid_harmonic: need 0 <= |m| <= l");
    const int am = std::abs(m);

    // A_m + i B_m = (x + iy)^m.
    TriPoly A = TriPoly::constant(1.0);
    TriPoly B;
    const TriPoly px({{1, 0, 0, 1.0}});
    const TriPoly py({{0, 1, 0, 1.0}});
    const TriPoly pz({{0, 0, 1, 1.0}});
    const TriPoly r2({{2, 0, 0, 1.0}, {0, 2, 0, 1.0}, {0, 0, 2, 1.0}});
    for (int k = 1; k <= am; ++k) {
        const TriPoly Anew = px * A + py * B * (-1.0);
        const TriPoly Bnew = px * B + py * A;
        A = Anew;
        B = Bnew;
    }

    // Pi_l^m(z, r^2) with r^l P_l^m(z/r) = Pi_l^m A_m for the cos branch.
    TriPoly pi_prev;              // Pi_{k-1}^m
    TriPoly pi = TriPoly::constant(1.0);  // Pi_m^m = (2m-1)!!
    for (int k = 1; k <= am; ++k) pi = pi * double(2 * k - 1);
    for (int k = am + 1; k <= l; ++k) {
        TriPoly next;
        if (k == am + 1) {
            next = pz * pi * double(2 * am + 1);
        } else {
            next = (pz * pi * double(2 * k - 1) +
                    r2 * pi_prev * double(-(k + am - 1))) *
                   (1.0 / double(k - am));
        }
        pi_prev = pi;
        pi = next;
    }

    double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI));
    if (am > 0) {
        double ratio = 1.0;  // (l-m)! / (l+m)!
        for (int k = l - am + 1; k <= l + am; ++k) ratio /= double(k);
        norm *= std::sqrt(2.0 * ratio);
    }

    const TriPoly angular = (m >= 0) ? A : B;
    return (pi * angular * norm).simplified();
}

}  // namespace reeblab
