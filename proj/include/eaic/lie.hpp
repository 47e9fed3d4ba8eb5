#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace eaic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Jac = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Frame labels used across the library. Transforms, twists and wrenches
/// carry these as metadata; combination sites verify them in checked builds
/// only, numeric code never branches on them.
namespace frames {
inline const std::string base = "base";
inline const std::string ee = "ee";
inline const std::string desired = "desired";
}  // namespace frames

namespace detail {
#ifndef NDEBUG
inline void check_frames(const std::string& a, const std::string& b, const char* where) {
    if (!a.empty() && !b.empty() && a != b) {
        throw std::logic_error(std::string(where) + ": frame mismatch '" + a + "' vs '" + b + "'");
    }
}
#else
inline void check_frames(const std::string&, const std::string&, const char*) {}
#endif
}  // namespace detail

/// Cross-product matrix: skew(v) * u == v x u.
inline Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

/// Axial vector of the antisymmetric part of a matrix, i.e. the vector v
/// with skew(v) == (M - M^T) / 2. House convention: this returns the
/// 3-vector, not the matrix, since the spring formulas consume vectors.
inline Vec3 asy(const Mat3& m) {
    return Vec3(0.5 * (m(2, 1) - m(1, 2)),
                0.5 * (m(0, 2) - m(2, 0)),
                0.5 * (m(1, 0) - m(0, 1)));
}

bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Rodrigues rotation about a unit axis. Throws if |axis| deviates from 1.
Mat3 rotation_from_axis_angle(const Vec3& axis, double angle);

/// Rigid pose: x_parent = rotation * x_child + translation.
struct Transform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    std::string parent;
    std::string child;

    static Transform identity(std::string parent = {}, std::string child = {}) {
        Transform t;
        t.parent = std::move(parent);
        t.child = std::move(child);
        return t;
    }

    Transform inverse() const {
        Transform t;
        t.rotation = rotation.transpose();
        t.translation = -(t.rotation * translation);
        t.parent = child;
        t.child = parent;
        return t;
    }

    Transform operator*(const Transform& rhs) const {
        detail::check_frames(child, rhs.parent, "Transform::operator*");
        Transform t;
        t.rotation = rotation * rhs.rotation;
        t.translation = rotation * rhs.translation + translation;
        t.parent = parent;
        t.child = rhs.child;
        return t;
    }

    Vec3 apply(const Vec3& point) const { return rotation * point + translation; }
};

/// 6-D velocity. Stacked order in 6-vector form is [linear; angular].
struct Twist {
    Vec3 angular = Vec3::Zero();
    Vec3 linear = Vec3::Zero();
    std::string frame;

    Vec6 to6() const {
        Vec6 v;
        v << linear, angular;
        return v;
    }
    static Twist from6(const Vec6& v, std::string frame = {}) {
        Twist t;
        t.linear = v.head<3>();
        t.angular = v.tail<3>();
        t.frame = std::move(frame);
        return t;
    }
};

/// 6-D force/moment pair. Stacked order in 6-vector form is [force; moment].
struct Wrench {
    Vec3 force = Vec3::Zero();
    Vec3 moment = Vec3::Zero();
    std::string frame;

    Vec6 to6() const {
        Vec6 v;
        v << force, moment;
        return v;
    }
    static Wrench from6(const Vec6& v, std::string frame = {}) {
        Wrench w;
        w.force = v.head<3>();
        w.moment = v.tail<3>();
        w.frame = std::move(frame);
        return w;
    }

    Wrench operator+(const Wrench& rhs) const {
        detail::check_frames(frame, rhs.frame, "Wrench::operator+");
        Wrench w;
        w.force = force + rhs.force;
        w.moment = moment + rhs.moment;
        w.frame = frame.empty() ? rhs.frame : frame;
        return w;
    }

    Wrench operator*(double s) const {
        Wrench w{force * s, moment * s, frame};
        return w;
    }
};

/// 6x6 map taking a wrench expressed in t.child coordinates (moment about the
/// child origin) to t.parent coordinates with moment about the parent origin:
///
///   [ R      0 ]
///   [ p^ R   R ]
///
/// which equals Ad^T of the inverse transform in the twist convention used
/// here; the moment picks up the p x f arm.
Mat6 adjoint_transpose(const Transform& t);

/// Full screw-map change of frame for a wrench (coordinates and reference
/// point move to t.parent).
Wrench wrench_frame_change(const Wrench& w, const Transform& t);

/// Power f.v + m.w of a wrench acting through a twist, both in the same frame
/// and referenced to the same point.
inline double wrench_twist_power(const Wrench& w, const Twist& t) {
    detail::check_frames(w.frame, t.frame, "wrench_twist_power");
    return w.force.dot(t.linear) + w.moment.dot(t.angular);
}

}  // namespace eaic
