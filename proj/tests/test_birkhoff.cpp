#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "reeblab/birkhoff.hpp"

using namespace reeblab;

namespace {

Trajectory equator_orbit(const ConformalMetric& m) {
    const PhasePoint p0 = PhasePoint::surface(m, Eigen::Vector3d(1, 0, 0),
                                              Eigen::Vector3d(0, 1, 0));
    const double L = 2.0 * M_PI * std::exp(m.u(p0.x));
    return integrate_geodesic(m, p0, L, {}, 256);
}

}  // namespace

TEST_CASE("round equator section: decode of the normal family") {
    const ConformalMetric round;
    const AnnulusSection section = build_annulus(round, equator_orbit(round));
    CHECK(section.length() == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
    // decode(s, pi/2) is the north-pointing unit frame at longitude s
    for (double s : {0.0, 1.0, 2.5, 5.0}) {
        const PhasePoint p = section.decode(s, M_PI / 2.0);
        CHECK(std::abs(p.x.z()) < 1e-9);
        CHECK((p.v - Eigen::Vector3d::UnitZ()).norm() < 1e-9);
        CHECK(p.x.x() == doctest::Approx(std::cos(s)).epsilon(1e-9));
        CHECK(p.x.y() == doctest::Approx(std::sin(s)).epsilon(1e-9));
    }
    CHECK_THROWS(section.decode(0.0, 1e-6));
    CHECK_THROWS(section.decode(0.0, M_PI - 1e-6));
}

TEST_CASE("encode inverts decode on random chart points") {
    const ConformalMetric m({{{2, 0}, 0.05}});
    const AnnulusSection section = build_annulus(m, equator_orbit(m));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> us(0.0, section.length());
    std::uniform_real_distribution<double> ut(0.05, M_PI - 0.05);
    for (int it = 0; it < 1000; ++it) {
        const double s = us(rng), theta = ut(rng);
        const auto [s1, theta1] = section.encode(section.decode(s, theta));
        double ds = std::fmod(s1 - s, section.length());
        if (ds > section.length() / 2) ds -= section.length();
        if (ds < -section.length() / 2) ds += section.length();
        CHECK(std::abs(ds) < 1e-10);
        CHECK(std::abs(theta1 - theta) < 1e-10);
    }
}

TEST_CASE("negative curvature somewhere is rejected") {
    // large zonal amplitude drives K below zero along the equator
    const ConformalMetric bad({{{2, 0}, 0.6}});
    REQUIRE(bad.curvature(Eigen::Vector3d(1, 0, 0)) <= 0.0);
    CHECK_THROWS(build_annulus(bad, equator_orbit(bad)));
}

TEST_CASE("a doubly traversed circle is not simple") {
    const ConformalMetric round;
    const PhasePoint p0 = PhasePoint::surface(round, Eigen::Vector3d(1, 0, 0),
                                              Eigen::Vector3d(0, 1, 0));
    const Trajectory twice = integrate_geodesic(round, p0, 4.0 * M_PI, {}, 512);
    CHECK_THROWS_WITH_AS(build_annulus(round, twice),
                         "build_annulus: gamma is not simple",
                         std::invalid_argument);
}

TEST_CASE("round metric: identity return map with time 2 pi") {
    const ConformalMetric round;
    const AnnulusSection section = build_annulus(round, equator_orbit(round));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> us(0.0, section.length());
    std::uniform_real_distribution<double> ut(0.3, M_PI - 0.3);
    for (int it = 0; it < 8; ++it) {
        const double s = us(rng), theta = ut(rng);
        const auto r = section.return_map(s, theta);
        CHECK(std::abs(r.time - 2.0 * M_PI) < 1e-6);
        double ds = std::fmod(r.s - s, section.length());
        if (ds > section.length() / 2) ds -= section.length();
        if (ds < -section.length() / 2) ds += section.length();
        CHECK(std::abs(ds) < 1e-6);
        CHECK(std::abs(r.theta - theta) < 1e-6);
    }
}

TEST_CASE("zonal metric: the equatorial-normal family is preserved") {
    const ConformalMetric m({{{2, 0}, 0.05}});
    const AnnulusSection section = build_annulus(m, equator_orbit(m));
    for (double s : {0.4, 2.0, 4.4}) {
        const auto r = section.return_map(s, M_PI / 2.0);
        CHECK(std::abs(r.theta - M_PI / 2.0) < 1e-8);
        double ds = std::fmod(r.s - s, section.length());
        if (ds > section.length() / 2) ds -= section.length();
        if (ds < -section.length() / 2) ds += section.length();
        CHECK(std::abs(ds) < 1e-8);  // meridian returns to its own longitude
        CHECK(r.time > 0.1);
    }
}

TEST_CASE("return map is area preserving in the invariant density") {
    const ConformalMetric m({{{2, 0}, 0.05}});
    const AnnulusSection section = build_annulus(m, equator_orbit(m));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(0.0, section.length());
    std::uniform_real_distribution<double> ut(0.4, M_PI - 0.4);
    for (int it = 0; it < 12; ++it) {
        const double aj = section.area_jacobian(us(rng), ut(rng));
        CHECK(std::abs(aj - 1.0) < 1e-4);
    }
    // stencil too near the boundary is rejected
    CHECK_THROWS(section.area_jacobian(0.0, 1.1e-4, 3e-4));

    // round metric: the return map is the identity, jacobian exactly 1
    const ConformalMetric round;
    const AnnulusSection rsec = build_annulus(round, equator_orbit(round));
    for (double theta : {0.8, M_PI / 2, 2.1})
        CHECK(std::abs(rsec.area_jacobian(1.0, theta) - 1.0) < 1e-4);
}

TEST_CASE("return times bounded and map invertible on a grid") {
    const ConformalMetric m({{{2, 0}, 0.05}});
    const AnnulusSection section = build_annulus(m, equator_orbit(m));
    double tmin = 1e300, tmax = 0.0;
    const int n = 8;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) {
            const double s = section.length() * i / n;
            const double theta = 0.35 + (M_PI - 0.7) * j / n;
            const auto r = section.return_map(s, theta);
            tmin = std::min(tmin, r.time);
            tmax = std::max(tmax, r.time);
            // backward return inverts the forward one
            const auto back = section.return_map(r.s, r.theta, -1);
            double ds = std::fmod(back.s - s, section.length());
            if (ds > section.length() / 2) ds -= section.length();
            if (ds < -section.length() / 2) ds += section.length();
            CHECK(std::abs(ds) < 1e-7);
            CHECK(std::abs(back.theta - theta) < 1e-7);
        }
    CHECK(tmin > 0.1);
    CHECK(tmax < 100.0);
}

TEST_CASE("invariant area converges under grid refinement") {
    const ConformalMetric m({{{2, 0}, 0.05}});
    const AnnulusSection section = build_annulus(m, equator_orbit(m));
    const double a1 = section.invariant_area(64);
    const double a2 = section.invariant_area(128);
    CHECK(std::abs(a2 - a1) / a2 < 1e-4);
    // the sin(theta) ds dtheta integral is 2 L
    CHECK(a2 == doctest::Approx(2.0 * section.length()).epsilon(1e-3));
}
