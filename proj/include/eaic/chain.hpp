#pragma once

#include "eaic/lie.hpp"

#include <string>
#include <vector>

namespace eaic {

/// One revolute joint plus the link it drives. `origin` is the fixed
/// transform from the parent link frame to the joint frame; the joint
/// rotates about `axis` expressed in that frame. Mass properties are given
/// in the rotated joint frame: `com` is the centre of mass offset and
/// `inertia` the rotational inertia about the centre of mass.
struct Joint {
    Transform origin = Transform::identity();
    Vec3 axis = Vec3::UnitZ();
    double mass = 1.0;
    Vec3 com = Vec3::Zero();
    Mat3 inertia = 1e-3 * Mat3::Identity();
    double position_lower = -1e9;
    double position_upper = 1e9;
    double effort_limit = 1e9;
};

struct ChainModel {
    std::string name;
    std::vector<Joint> joints;
    Transform ee_offset = Transform::identity();
    Vec3 gravity = Vec3(0.0, 0.0, -9.80665);

    int dof() const { return static_cast<int>(joints.size()); }
    void validate() const;  // throws on empty chain, bad mass or inertia

    /// 3-DOF planar arm (z axes, links along x) with simple parameters,
    /// gravity-free so in-plane analytic checks stay exact.
    static ChainModel planar3();
    /// 7-DOF chain with Panda-like kinematic offsets and inertial
    /// parameters of a plausible magnitude.
    static ChainModel panda7();
    /// Single revolute joint about +y with the link hanging along -z at
    /// q = 0; the classic pendulum fixture.
    static ChainModel pendulum(double mass, double com_distance, double inertia_about_com);
};

struct RobotState {
    VecX q;
    VecX qdot;

    static RobotState zero(int dof) {
        RobotState s;
        s.q = VecX::Zero(dof);
        s.qdot = VecX::Zero(dof);
        return s;
    }
};

/// Base-to-end-effector pose.
Transform forward_kinematics(const ChainModel& model, const VecX& q);

/// Geometric Jacobian in the base frame; rows 0..2 give the linear velocity
/// of the end-effector origin, rows 3..5 the angular velocity.
Jac jacobian(const ChainModel& model, const VecX& q);

Twist ee_twist(const ChainModel& model, const RobotState& state);

/// Joint-space inertia, symmetric positive definite.
MatX mass_matrix(const ChainModel& model, const VecX& q);

/// Torques that hold the chain still under gravity: g(q).
VecX gravity_vector(const ChainModel& model, const VecX& q);

/// Velocity-product torques C(q, qdot) * qdot, gravity excluded.
VecX coriolis_bias(const ChainModel& model, const VecX& q, const VecX& qdot);

/// qddot = M(q)^-1 (tau - C(q,qdot) qdot - g(q)).
VecX forward_dynamics(const ChainModel& model, const RobotState& state, const VecX& tau);

/// 0.5 qdot^T M(q) qdot.
double kinetic_coenergy(const ChainModel& model, const RobotState& state);

/// Gravitational potential relative to the base origin plane; the finite
/// difference of this along q equals gravity_vector.
double gravity_potential(const ChainModel& model, const VecX& q);

}  // namespace eaic
