#pragma once

#include "eaic/lie.hpp"

namespace eaic {

/// Co-stiffness of a symmetric stiffness matrix: G = tr(K)/2 * I - K.
/// The inverse map is K = tr(G) * I - G.
Mat3 co_stiffness(const Mat3& k);

/// Translational, rotational and coupling stiffness of a spatial spring plus
/// the energy scale applied to the derived co-stiffnesses. The base K
/// matrices are kept unscaled so that rescaling never compounds: the scale
/// always multiplies the same baseline.
struct StiffnessSet {
    Mat3 translational = Mat3::Zero();
    Mat3 rotational = Mat3::Zero();
    Mat3 coupling = Mat3::Zero();
    double scale = 1.0;

    Mat3 g_translational() const { return scale * co_stiffness(translational); }
    Mat3 g_rotational() const { return scale * co_stiffness(rotational); }
    Mat3 g_coupling() const { return scale * co_stiffness(coupling); }

    /// Copy with a new energy scale in [0, 1]; throws otherwise.
    StiffnessSet scaled(double new_scale) const;

    static StiffnessSet isotropic(double k_t, double k_r, double k_c = 0.0) {
        StiffnessSet s;
        s.translational = k_t * Mat3::Identity();
        s.rotational = k_r * Mat3::Identity();
        s.coupling = k_c * Mat3::Identity();
        return s;
    }
};

/// Current and desired end-effector poses, both base-frame.
struct SpringState {
    Transform current;
    Transform desired;
};

/// Elastic wrench of the spatial spring, expressed in the end-effector frame
/// and referenced to the end-effector origin. With R the rotation and p the
/// translation of the current pose relative to the desired one, and G the
/// scaled co-stiffnesses:
///
///   f = -R^T asy(G_t p^) - asy(G_t u^) - 2 asy(G_c R)
///   m = -2 asy(G_r R) - asy(G_t u^ u^) - 2 asy(G_c p^ R)
///
/// where u^ = R^T p^ R. The wrench is the exact negative differential of
/// potential_energy along body twists of the current pose.
Wrench elastic_wrench(const SpringState& state, const StiffnessSet& stiffness);

/// Change of coordinates of an end-effector wrench into the base frame. The
/// reference point stays at the end-effector origin, which is the convention
/// the geometric Jacobian pairs with.
Wrench wrench_to_base(const Wrench& w_ee, const Transform& current);

/// Spring potential energy (J), linear in the energy scale. Zero exactly at
/// zero displacement for positive definite stiffness without coupling.
double potential_energy(const SpringState& state, const StiffnessSet& stiffness);

}  // namespace eaic
