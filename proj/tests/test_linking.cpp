#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reeblab/linking.hpp"
#include "reeblab/orbits.hpp"

using namespace reeblab;

namespace {

Quaternion hopf_fiber(const Quaternion& q0, double t) {
    return qmul(exp_i(2.0 * M_PI * t), q0);  // left Hopf circle through q0
}

}  // namespace

TEST_CASE("unlinked distant circles have linking zero") {
    auto c1 = [](double t) {
        return Eigen::Vector3d(std::cos(2 * M_PI * t), std::sin(2 * M_PI * t), 0.0);
    };
    auto c2 = [](double t) {
        return Eigen::Vector3d(std::cos(2 * M_PI * t) + 5.0, 4.0,
                               std::sin(2 * M_PI * t));
    };
    const LinkingResult lk = linking_number(c1, c2, 256, 2048, 0.05);
    CHECK(lk.linking == 0);
    CHECK(lk.residual < 0.05);
}

TEST_CASE("a plainly linked pair gives +-1") {
    // unit circle in the xy-plane and a unit circle through its center in
    // the xz-plane: |linking| = 1
    auto c1 = [](double t) {
        return Eigen::Vector3d(std::cos(2 * M_PI * t), std::sin(2 * M_PI * t), 0.0);
    };
    auto c2 = [](double t) {
        return Eigen::Vector3d(1.0 + std::cos(2 * M_PI * t), 0.0,
                               std::sin(2 * M_PI * t));
    };
    const LinkingResult lk = linking_number(c1, c2, 256, 2048, 0.05);
    CHECK(std::abs(lk.linking) == 1);
}

TEST_CASE("distinct Hopf fibers link +1") {
    const Quaternion qa = Quaternion::identity();
    const Quaternion qb = Quaternion::j();
    std::vector<Quaternion> avoid;
    for (int i = 0; i < 64; ++i) {
        avoid.push_back(hopf_fiber(qa, i / 64.0));
        avoid.push_back(hopf_fiber(qb, i / 64.0));
    }
    const Stereographic chart(Stereographic::select_pole(avoid));
    auto c1 = [&](double t) { return chart.project(hopf_fiber(qa, t)); };
    auto c2 = [&](double t) { return chart.project(hopf_fiber(qb, t)); };
    const LinkingResult lk = linking_number(c1, c2, 512, 4096, 0.05);
    CHECK(lk.linking == 1);
    CHECK(lk.residual < 0.05);
}

TEST_CASE("stereographic pole selection avoids the curves") {
    std::vector<Quaternion> avoid;
    for (int i = 0; i < 128; ++i) avoid.push_back(hopf_fiber(Quaternion::identity(), i / 128.0));
    const Quaternion pole = Stereographic::select_pole(avoid);
    for (const Quaternion& q : avoid) CHECK((q - pole).norm() > 0.5);
    // projecting the pole itself is rejected
    CHECK_THROWS(Stereographic(pole).project(pole));
}

TEST_CASE("self-linking of the Hopf circle is -1") {
    // the binding orbit of the standard structure: multiplier 1, Reeb field
    // -iq, whose orbit through q0 = 1 is the Hopf circle (period 2 pi)
    const ContactForm form = ContactForm::standard();
    const int sl = self_linking(form, Quaternion::identity(), 2.0 * M_PI);
    CHECK(sl == -1);
}

TEST_CASE("self-linking of a lifted round great-circle orbit is -1") {
    // the lifted geodesic orbits are Hopf fibers traversed at half speed
    const ContactForm form = ContactForm::lifted(ConformalMetric{});
    const int sl = self_linking(form, Quaternion::identity(), 4.0 * M_PI);
    CHECK(sl == -1);
}

TEST_CASE("open curves are rejected") {
    const ContactForm form = ContactForm::standard();
    const Trajectory open_arc =
        integrate_reeb(form, Quaternion::identity(), 1.0, {}, 64);
    CHECK_THROWS(self_linking(form, open_arc));
}
