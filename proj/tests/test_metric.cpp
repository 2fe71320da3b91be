#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "reeblab/metric.hpp"

using namespace reeblab;

namespace {

/// Independent curvature oracle: the Brioschi formula applied to
/// central-difference derivatives of the first fundamental form in the
/// stereographic chart (projection from the south pole, so the north pole
/// is a regular chart point).  Uses nothing from ConformalMetric except
/// pointwise values of u.
struct BrioschiOracle {
    const ConformalMetric& metric;

    Eigen::Vector3d embed(double X, double Y) const {
        const double r2 = X * X + Y * Y;
        return Eigen::Vector3d(2.0 * X, 2.0 * Y, 1.0 - r2) / (1.0 + r2);
    }

    // E = G = e^{2u} * 4 / (1 + X^2 + Y^2)^2, F = 0 (conformal chart)
    double E(double X, double Y) const {
        const double r2 = X * X + Y * Y;
        const double conf = 4.0 / ((1.0 + r2) * (1.0 + r2));
        return std::exp(2.0 * metric.u(embed(X, Y))) * conf;
    }

    double curvature_step(double X, double Y, double h) const {
        auto Ef = [&](double a, double b) { return E(a, b); };
        const double e = Ef(X, Y);
        const double Ex = (Ef(X + h, Y) - Ef(X - h, Y)) / (2 * h);
        const double Ey = (Ef(X, Y + h) - Ef(X, Y - h)) / (2 * h);
        const double Exx = (Ef(X + h, Y) - 2 * e + Ef(X - h, Y)) / (h * h);
        const double Eyy = (Ef(X, Y + h) - 2 * e + Ef(X, Y - h)) / (h * h);
        // Brioschi with E = G, F = 0 reduces to
        // K = -(Exx + Eyy - (Ex^2 + Ey^2)/E) / (2 E^2)
        return -(Exx + Eyy - (Ex * Ex + Ey * Ey) / e) / (2.0 * e * e);
    }

    double curvature(double X, double Y) const {
        // Richardson-extrapolated central differences
        const double h = 1e-3;
        return (4.0 * curvature_step(X, Y, h / 2) - curvature_step(X, Y, h)) /
               3.0;
    }
};

}  // namespace

TEST_CASE("spherical harmonics: orthonormal values and Laplacian eigenvalue") {
    // Y_{0,0}-free expansion; check Y_{2,0} against the closed form.
    const TriPoly y20 = real_solid_harmonic(2, 0);
    const TriPoly y22 = real_solid_harmonic(2, 2);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 50; ++i) {
        const Eigen::Vector3d x =
            Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized();
        const double ref20 = 0.25 * std::sqrt(5.0 / M_PI) * (3 * x.z() * x.z() - 1);
        CHECK(y20.eval(x) == doctest::Approx(ref20).epsilon(1e-12));
        const double ref22 =
            0.25 * std::sqrt(15.0 / M_PI) * (x.x() * x.x() - x.y() * x.y());
        CHECK(y22.eval(x) == doctest::Approx(ref22).epsilon(1e-12));
    }

    // orthonormality over the sphere by quadrature of a few pairs
    auto inner = [](const TriPoly& a, const TriPoly& b) {
        double acc = 0.0;
        const int n = 200, m = 400;
        for (int i = 0; i < n; ++i) {
            const double mu = -1.0 + 2.0 * (i + 0.5) / n;
            const double s = std::sqrt(1.0 - mu * mu);
            for (int j = 0; j < m; ++j) {
                const double phi = 2.0 * M_PI * j / m;
                const Eigen::Vector3d x(s * std::cos(phi), s * std::sin(phi), mu);
                acc += a.eval(x) * b.eval(x);
            }
        }
        return acc * (2.0 / n) * (2.0 * M_PI / m);
    };
    CHECK(inner(y20, y20) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(inner(y22, y22) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(inner(y20, y22) == doctest::Approx(0.0).epsilon(1e-6));
    const TriPoly y31 = real_solid_harmonic(3, 1);
    const TriPoly y3m2 = real_solid_harmonic(3, -2);
    CHECK(inner(y31, y31) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(inner(y3m2, y3m2) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(inner(y31, y20) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("gradient of the harmonic polynomials is exact") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    for (int l = 1; l <= 5; ++l)
        for (int m = -l; m <= l; ++m) {
            const TriPoly p = real_solid_harmonic(l, m);
            const Eigen::Vector3d x(nd(rng), nd(rng), nd(rng));
            const Eigen::Vector3d g = p.gradient(x);
            const double h = 1e-6;
            for (int c = 0; c < 3; ++c) {
                Eigen::Vector3d xp = x, xm = x;
                xp[c] += h;
                xm[c] -= h;
                CHECK(g[c] == doctest::Approx((p.eval(xp) - p.eval(xm)) / (2 * h))
                                  .epsilon(1e-6));
            }
        }
}

TEST_CASE("curvature closed forms") {
    const ConformalMetric round;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector3d x =
            Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized();
        CHECK(round.curvature(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // constant u = c (a homothety through Y_00): K = e^{-2c}
    const double c = 0.3;
    const ConformalMetric homothety({{{0, 0}, c * std::sqrt(4.0 * M_PI)}});
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector3d x =
            Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized();
        CHECK(homothety.curvature(x) ==
              doctest::Approx(std::exp(-2.0 * c)).epsilon(1e-14));
    }
    CHECK(std::abs(homothety.total_curvature() - 4.0 * M_PI) < 1e-6);

    const ConformalMetric m({{{2, 0}, 0.1}, {{3, 1}, -0.05}});
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector3d x =
            Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized();
        const double expect =
            std::exp(-2.0 * m.u(x)) * (1.0 - m.laplacian_u(x));
        CHECK(m.curvature(x) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("curvature against the finite-difference Brioschi oracle") {
    const ConformalMetric m({{{2, 0}, 0.1}});
    const BrioschiOracle oracle{m};
    // north pole is (X, Y) = (0, 0) in the chart
    CHECK(m.curvature(Eigen::Vector3d(0, 0, 1)) ==
          doctest::Approx(oracle.curvature(0.0, 0.0)).epsilon(1e-6));
    // a few generic chart points
    const ConformalMetric m2({{{2, 2}, 0.07}, {{4, 0}, 0.03}});
    const BrioschiOracle oracle2{m2};
    for (const auto& [X, Y] : std::vector<std::pair<double, double>>{
             {0.3, -0.2}, {-0.5, 0.1}, {0.0, 0.45}}) {
        CHECK(m2.curvature(oracle2.embed(X, Y)) ==
              doctest::Approx(oracle2.curvature(X, Y)).epsilon(1e-6));
    }
}

TEST_CASE("Gauss-Bonnet on several metrics") {
    std::vector<ConformalMetric> metrics;
    metrics.emplace_back();
    metrics.emplace_back(std::map<std::pair<int, int>, double>{{{2, 0}, 0.05}});
    metrics.emplace_back(std::map<std::pair<int, int>, double>{
        {{2, 0}, 0.05}, {{2, 2}, 0.015}});
    metrics.emplace_back(std::map<std::pair<int, int>, double>{
        {{3, 1}, -0.04}, {{4, 2}, 0.02}, {{1, 0}, 0.1}});
    for (const auto& m : metrics)
        CHECK(std::abs(m.total_curvature() - 4.0 * M_PI) < 1e-6);
}

TEST_CASE("descriptor round-trip") {
    std::map<std::pair<int, int>, double> coef{
        {{2, 0}, 0.05},
        {{2, 2}, 0.3333333333333333},
        {{5, -3}, -1.2345678901234567e-2}};
    const ConformalMetric m(coef);
    std::stringstream ss;
    m.save(ss);
    const ConformalMetric back = ConformalMetric::load(ss);
    REQUIRE(back.coefficients().size() == coef.size());
    for (const auto& [lm, c] : coef) {
        CHECK(back.coefficients().count(lm) == 1);
        CHECK(back.coefficients().at(lm) == c);  // bit-exact
    }

    std::stringstream bad("(2) 0.05\n");
    CHECK_THROWS(ConformalMetric::load(bad));
    std::stringstream dup("(2,0) 0.05\n(2,0) 0.06\n");
    CHECK_THROWS(ConformalMetric::load(dup));
    std::stringstream comments("# metric\n(2,0) 0.05  # zonal\n\n");
    CHECK(ConformalMetric::load(comments).coefficients().at({2, 0}) == 0.05);
    std::stringstream range("(9,0) 0.05\n");
    CHECK_THROWS(ConformalMetric::load(range));
}
