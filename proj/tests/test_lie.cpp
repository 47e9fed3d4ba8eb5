#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eaic/lie.hpp"

#include <random>

using namespace eaic;

namespace {

std::mt19937 rng(12345);

Vec3 random_vec3(double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    return Vec3(dist(rng), dist(rng), dist(rng));
}

Mat3 random_mat3(double scale = 1.0) {
    Mat3 m;
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = dist(rng);
    return m;
}

Mat3 random_rotation() {
    Vec3 axis = random_vec3();
    while (axis.norm() < 1e-6) axis = random_vec3();
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    return rotation_from_axis_angle(axis.normalized(), angle(rng));
}

Transform random_transform() {
    Transform t;
    t.rotation = random_rotation();
    t.translation = random_vec3(0.8);
    return t;
}

// Twist change of frame paired with adjoint_transpose: spatial map
// [R  p^R; 0  R].
Mat6 twist_adjoint(const Transform& t) {
    Mat6 m = Mat6::Zero();
    m.block<3, 3>(0, 0) = t.rotation;
    m.block<3, 3>(0, 3) = skew(t.translation) * t.rotation;
    m.block<3, 3>(3, 3) = t.rotation;
    return m;
}

}  // namespace

TEST_CASE("skew basics") {
    CHECK(skew(Vec3::Zero()).isZero(0.0));
    const Vec3 x(1, 0, 0), y(0, 1, 0);
    CHECK((skew(x) * y - Vec3(0, 0, 1)).norm() == doctest::Approx(0.0));
    for (int i = 0; i < 50; ++i) {
        const Vec3 v = random_vec3(2.0), w = random_vec3(2.0);
        const Vec3 brute(v.y() * w.z() - v.z() * w.y(),
                         v.z() * w.x() - v.x() * w.z(),
                         v.x() * w.y() - v.y() * w.x());
        CHECK((skew(v) * w - brute).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((skew(v) + skew(v).transpose()).isZero(0.0));
    }
}

TEST_CASE("asy extracts the axial vector of the antisymmetric part") {
    CHECK(asy(Mat3::Identity()).norm() == 0.0);
    const Vec3 v(1, 2, 3);
    CHECK((asy(skew(v)) - v).norm() == doctest::Approx(0.0));
    for (int i = 0; i < 50; ++i) {
        const Mat3 m = random_mat3(3.0);
        const Mat3 anti = 0.5 * (m - m.transpose());
        CHECK((skew(asy(m)) - anti).cwiseAbs().maxCoeff() < 1e-12);
        // symmetric additions vanish
        const Mat3 sym = m + m.transpose();
        CHECK((asy(m + 0.7 * sym) - asy(m)).norm() < 1e-12);
    }
}

TEST_CASE("rotation_from_axis_angle") {
    CHECK((rotation_from_axis_angle(Vec3::UnitX(), 0.0) - Mat3::Identity()).norm() < 1e-15);
    const Mat3 quarter = rotation_from_axis_angle(Vec3::UnitZ(), M_PI_2);
    CHECK((quarter * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK_THROWS_AS(rotation_from_axis_angle(Vec3(1, 1, 0), 0.3), std::invalid_argument);
    for (int i = 0; i < 50; ++i) {
        const Mat3 r = random_rotation();
        CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
        CHECK(is_rotation(r));
    }
}

TEST_CASE("transform composition and inverse") {
    for (int i = 0; i < 30; ++i) {
        const Transform a = random_transform();
        const Transform b = random_transform();
        const Transform c = (a * b) * random_transform();
        const Transform c2 = a * (b * (c.inverse() * c));  // associativity smoke
        (void)c2;
        const Transform id = a.inverse() * a;
        CHECK((id.rotation - Mat3::Identity()).norm() < 1e-9);
        CHECK(id.translation.norm() < 1e-9);
    }
#ifndef NDEBUG
    Transform a = Transform::identity("base", "ee");
    Transform b = Transform::identity("desired", "tool");
    CHECK_THROWS_AS(a * b, std::logic_error);
#endif
}

TEST_CASE("adjoint_transpose maps wrenches with the moment arm") {
    CHECK((adjoint_transpose(Transform::identity()) - Mat6::Identity()).norm() == 0.0);

    Transform shift = Transform::identity();
    shift.translation = Vec3(0.2, -0.4, 0.7);
    Wrench w;
    w.force = Vec3(3, -1, 2);
    const Vec6 mapped = adjoint_transpose(shift) * w.to6();
    CHECK((mapped.head<3>() - w.force).norm() < 1e-14);
    CHECK((mapped.tail<3>() - shift.translation.cross(w.force)).norm() < 1e-14);

    for (int i = 0; i < 30; ++i) {
        const Transform t = random_transform();
        const Vec6 w6 = (Vec6() << random_vec3(5.0), random_vec3(2.0)).finished();
        const Vec6 round = adjoint_transpose(t.inverse()) * (adjoint_transpose(t) * w6);
        CHECK((round - w6).cwiseAbs().maxCoeff() < 1e-10);

        // composition is the matrix product in the same order
        const Transform t2 = random_transform();
        const Mat6 lhs = adjoint_transpose(t * t2);
        const Mat6 rhs = adjoint_transpose(t) * adjoint_transpose(t2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("wrench frame change agrees with the adjoint matrix route") {
    for (int i = 0; i < 30; ++i) {
        Transform t = random_transform();
        t.parent = frames::base;
        t.child = frames::ee;
        Wrench w;
        w.force = random_vec3(5.0);
        w.moment = random_vec3(2.0);
        w.frame = frames::ee;
        const Vec6 via_matrix = adjoint_transpose(t) * w.to6();
        const Wrench via_struct = wrench_frame_change(w, t);
        CHECK((via_struct.to6() - via_matrix).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(via_struct.frame == frames::base);
    }
}

TEST_CASE("wrench power is invariant under a consistent frame change") {
    for (int i = 0; i < 30; ++i) {
        const Transform t = random_transform();
        const Vec6 w6 = (Vec6() << random_vec3(5.0), random_vec3(2.0)).finished();
        const Vec6 t6 = (Vec6() << random_vec3(1.0), random_vec3(1.0)).finished();
        const double before = w6.dot(t6);
        const double after = (adjoint_transpose(t) * w6).dot(twist_adjoint(t) * t6);
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("wrench frame metadata is enforced on addition in checked builds") {
    Wrench a;
    a.frame = frames::base;
    Wrench b;
    b.frame = frames::base;
    CHECK((a + b).frame == frames::base);
#ifndef NDEBUG
    Wrench c;
    c.frame = frames::ee;
    CHECK_THROWS_AS(a + c, std::logic_error);
#endif
}
