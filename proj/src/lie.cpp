#include "eaic/lie.hpp"

#include <cmath>

namespace eaic {

bool is_rotation(const Mat3& r, double tol) {
    const Mat3 should_be_identity = r * r.transpose() - Mat3::Identity();
    if (should_be_identity.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 rotation_from_axis_angle(const Vec3& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation_from_axis_angle: axis must be unit length");
    }
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Mat6 adjoint_transpose(const Transform& t) {
    Mat6 m = Mat6::Zero();
    m.block<3, 3>(0, 0) = t.rotation;
    m.block<3, 3>(3, 3) = t.rotation;
    m.block<3, 3>(3, 0) = skew(t.translation) * t.rotation;
    return m;
}

Wrench wrench_frame_change(const Wrench& w, const Transform& t) {
    detail::check_frames(w.frame, t.child, "wrench_frame_change");
    Wrench out;
    out.force = t.rotation * w.force;
    out.moment = t.rotation * w.moment + t.translation.cross(out.force);
    out.frame = t.parent;
    return out;
}

}  // namespace eaic
