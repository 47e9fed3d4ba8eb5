#include "eaic/spring.hpp"

namespace eaic {

Mat3 co_stiffness(const Mat3& k) {
    return 0.5 * k.trace() * Mat3::Identity() - k;
}

StiffnessSet StiffnessSet::scaled(double new_scale) const {
    if (!(new_scale >= 0.0 && new_scale <= 1.0)) {
        throw std::invalid_argument("StiffnessSet::scaled: scale must lie in [0, 1]");
    }
    StiffnessSet s = *this;
    s.scale = new_scale;
    return s;
}

namespace {

struct RelativePose {
    Mat3 r;       // rotation of current relative to desired
    Vec3 p;       // translation of current relative to desired
    Mat3 p_hat;
    Mat3 u_hat;   // R^T p^ R
};

RelativePose relative_pose(const SpringState& state) {
    const Transform rel = state.desired.inverse() * state.current;
    RelativePose out;
    out.r = rel.rotation;
    out.p = rel.translation;
    out.p_hat = skew(out.p);
    out.u_hat = out.r.transpose() * out.p_hat * out.r;
    return out;
}

}  // namespace

Wrench elastic_wrench(const SpringState& state, const StiffnessSet& stiffness) {
    const RelativePose rel = relative_pose(state);
    const Mat3 g_t = stiffness.g_translational();
    const Mat3 g_r = stiffness.g_rotational();
    const Mat3 g_c = stiffness.g_coupling();

    Wrench w;
    w.force = -rel.r.transpose() * asy(g_t * rel.p_hat)
              - asy(g_t * rel.u_hat)
              - 2.0 * asy(g_c * rel.r);
    w.moment = -2.0 * asy(g_r * rel.r)
               - asy(g_t * rel.u_hat * rel.u_hat)
               - 2.0 * asy(g_c * rel.p_hat * rel.r);
    w.frame = frames::ee;
    return w;
}

Wrench wrench_to_base(const Wrench& w_ee, const Transform& current) {
    detail::check_frames(w_ee.frame, frames::ee, "wrench_to_base");
    Wrench out;
    out.force = current.rotation * w_ee.force;
    out.moment = current.rotation * w_ee.moment;
    out.frame = frames::base;
    return out;
}

double potential_energy(const SpringState& state, const StiffnessSet& stiffness) {
    const RelativePose rel = relative_pose(state);
    const Mat3 g_t = stiffness.g_translational();
    const Mat3 g_r = stiffness.g_rotational();
    const Mat3 g_c = stiffness.g_coupling();

    // tr(G)I - G recovers the (scaled) stiffness from the co-stiffness.
    const Mat3 k_t = g_t.trace() * Mat3::Identity() - g_t;
    const Vec3 u = rel.r.transpose() * rel.p;

    const double u_trans = 0.25 * rel.p.dot(k_t * rel.p) + 0.25 * u.dot(k_t * u);
    const double u_rot = g_r.trace() - (g_r * rel.r).trace();
    const double u_coupling = -(g_c * rel.p_hat * rel.r).trace();
    return u_trans + u_rot + u_coupling;
}

}  // namespace eaic
