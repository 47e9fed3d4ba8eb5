#include "eaic/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace eaic {

namespace {

struct LinkKin {
    Mat3 r;       // world rotation of the rotated joint frame
    Vec3 origin;  // world position of the joint origin
    Vec3 axis;    // joint axis in world coordinates
    Vec3 com;     // world centre of mass of the link
};

std::vector<LinkKin> link_kinematics(const ChainModel& model, const VecX& q) {
    const int n = model.dof();
    std::vector<LinkKin> kin(static_cast<size_t>(n));
    Mat3 r = Mat3::Identity();
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        const Joint& joint = model.joints[static_cast<size_t>(i)];
        p += r * joint.origin.translation;
        r *= joint.origin.rotation;
        const Vec3 world_axis = r * joint.axis;
        r *= Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix();
        auto& k = kin[static_cast<size_t>(i)];
        k.r = r;
        k.origin = p;
        k.axis = world_axis;
        k.com = p + r * joint.com;
    }
    return kin;
}

// Recursive Newton-Euler in world coordinates; returns the joint torques
// that realize qddot at (q, qdot) against the given gravity field.
VecX newton_euler(const ChainModel& model, const VecX& q, const VecX& qdot,
                  const VecX& qddot, const Vec3& gravity) {
    const int n = model.dof();
    const auto kin = link_kinematics(model, q);

    std::vector<Vec3> omega(static_cast<size_t>(n));
    std::vector<Vec3> alpha(static_cast<size_t>(n));
    std::vector<Vec3> acc_origin(static_cast<size_t>(n));
    std::vector<Vec3> acc_com(static_cast<size_t>(n));

    Vec3 omega_prev = Vec3::Zero();
    Vec3 alpha_prev = Vec3::Zero();
    Vec3 acc_prev = Vec3::Zero();
    Vec3 origin_prev = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        const auto& k = kin[static_cast<size_t>(i)];
        const Vec3 step = k.origin - origin_prev;
        const Vec3 a_o = acc_prev + alpha_prev.cross(step) + omega_prev.cross(omega_prev.cross(step));
        const Vec3 w = omega_prev + k.axis * qdot[i];
        const Vec3 al = alpha_prev + k.axis * qddot[i] + omega_prev.cross(k.axis * qdot[i]);
        const Vec3 arm = k.com - k.origin;
        omega[static_cast<size_t>(i)] = w;
        alpha[static_cast<size_t>(i)] = al;
        acc_origin[static_cast<size_t>(i)] = a_o;
        acc_com[static_cast<size_t>(i)] = a_o + al.cross(arm) + w.cross(w.cross(arm));
        omega_prev = w;
        alpha_prev = al;
        acc_prev = a_o;
        origin_prev = k.origin;
    }

    VecX tau = VecX::Zero(n);
    Vec3 f_child = Vec3::Zero();
    Vec3 n_child = Vec3::Zero();
    Vec3 child_origin = Vec3::Zero();
    for (int i = n - 1; i >= 0; --i) {
        const auto& k = kin[static_cast<size_t>(i)];
        const Joint& joint = model.joints[static_cast<size_t>(i)];
        const Mat3 inertia_world = k.r * joint.inertia * k.r.transpose();
        const Vec3 f_link = joint.mass * (acc_com[static_cast<size_t>(i)] - gravity);
        const Vec3 n_link = inertia_world * alpha[static_cast<size_t>(i)] +
                            omega[static_cast<size_t>(i)].cross(inertia_world * omega[static_cast<size_t>(i)]);
        Vec3 f = f_link + f_child;
        Vec3 moment = n_link + (k.com - k.origin).cross(f_link);
        if (i < n - 1) {
            moment += n_child + (child_origin - k.origin).cross(f_child);
        }
        tau[i] = k.axis.dot(moment);
        f_child = f;
        n_child = moment;
        child_origin = k.origin;
    }
    return tau;
}

}  // namespace

void ChainModel::validate() const {
    if (joints.empty()) throw std::invalid_argument("ChainModel: at least one joint required");
    for (size_t i = 0; i < joints.size(); ++i) {
        const Joint& j = joints[i];
        if (!(j.mass > 0.0)) throw std::invalid_argument("ChainModel: link mass must be positive");
        if ((j.inertia - j.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw std::invalid_argument("ChainModel: link inertia must be symmetric");
        }
        Eigen::LLT<Mat3> llt(j.inertia);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument("ChainModel: link inertia must be positive definite");
        }
        if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("ChainModel: joint axis must be unit length");
        }
    }
}

Transform forward_kinematics(const ChainModel& model, const VecX& q) {
    const auto kin = link_kinematics(model, q);
    const auto& last = kin.back();
    Transform ee;
    ee.rotation = last.r * model.ee_offset.rotation;
    ee.translation = last.origin + last.r * model.ee_offset.translation;
    ee.parent = frames::base;
    ee.child = frames::ee;
    return ee;
}

Jac jacobian(const ChainModel& model, const VecX& q) {
    const int n = model.dof();
    const auto kin = link_kinematics(model, q);
    const Vec3 p_ee = kin.back().origin + kin.back().r * model.ee_offset.translation;
    Jac j(6, n);
    for (int i = 0; i < n; ++i) {
        const auto& k = kin[static_cast<size_t>(i)];
        j.block<3, 1>(0, i) = k.axis.cross(p_ee - k.origin);
        j.block<3, 1>(3, i) = k.axis;
    }
    return j;
}

Twist ee_twist(const ChainModel& model, const RobotState& state) {
    return Twist::from6(jacobian(model, state.q) * state.qdot, frames::base);
}

MatX mass_matrix(const ChainModel& model, const VecX& q) {
    const int n = model.dof();
    const VecX zero = VecX::Zero(n);
    MatX m(n, n);
    for (int j = 0; j < n; ++j) {
        VecX unit = VecX::Zero(n);
        unit[j] = 1.0;
        m.col(j) = newton_euler(model, q, zero, unit, Vec3::Zero());
    }
    return 0.5 * (m + m.transpose());
}

VecX gravity_vector(const ChainModel& model, const VecX& q) {
    return newton_euler(model, q, VecX::Zero(model.dof()), VecX::Zero(model.dof()), model.gravity);
}

VecX coriolis_bias(const ChainModel& model, const VecX& q, const VecX& qdot) {
    return newton_euler(model, q, qdot, VecX::Zero(model.dof()), Vec3::Zero());
}

VecX forward_dynamics(const ChainModel& model, const RobotState& state, const VecX& tau) {
    const MatX m = mass_matrix(model, state.q);
    Eigen::LLT<MatX> llt(m);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("forward_dynamics: mass matrix not positive definite");
    }
    const VecX bias = coriolis_bias(model, state.q, state.qdot) + gravity_vector(model, state.q);
    return llt.solve(tau - bias);
}

double kinetic_coenergy(const ChainModel& model, const RobotState& state) {
    return 0.5 * state.qdot.dot(mass_matrix(model, state.q) * state.qdot);
}

double gravity_potential(const ChainModel& model, const VecX& q) {
    const auto kin = link_kinematics(model, q);
    double v = 0.0;
    for (size_t i = 0; i < kin.size(); ++i) {
        v -= model.joints[i].mass * model.gravity.dot(kin[i].com);
    }
    return v;
}

ChainModel ChainModel::planar3() {
    ChainModel model;
    model.name = "planar3";
    const double lengths[3] = {1.0, 0.8, 0.6};
    const double masses[3] = {2.0, 1.5, 1.0};
    Vec3 offset = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        Joint j;
        j.origin = Transform::identity();
        j.origin.translation = offset;
        j.axis = Vec3::UnitZ();
        j.mass = masses[i];
        j.com = Vec3(0.5 * lengths[i], 0.0, 0.0);
        const double rod = masses[i] * lengths[i] * lengths[i] / 12.0;
        j.inertia = Vec3(1e-3, rod, rod).asDiagonal();
        j.effort_limit = 200.0;
        model.joints.push_back(j);
        offset = Vec3(lengths[i], 0.0, 0.0);
    }
    model.ee_offset.translation = offset;
    return model;
}

ChainModel ChainModel::pendulum(double mass, double com_distance, double inertia_about_com) {
    ChainModel model;
    model.name = "pendulum";
    Joint j;
    j.axis = Vec3::UnitY();
    j.mass = mass;
    j.com = Vec3(0.0, 0.0, -com_distance);
    j.inertia = inertia_about_com * Mat3::Identity();
    model.joints.push_back(j);
    model.ee_offset.translation = Vec3(0.0, 0.0, -2.0 * com_distance);
    return model;
}

ChainModel ChainModel::panda7() {
    ChainModel model;
    model.name = "panda7";

    // Modified-DH rows (alpha_{i-1}, a_{i-1}, d_i) of a Panda-class arm.
    struct Row { double alpha, a, d; };
    const Row rows[7] = {
        {0.0, 0.0, 0.333},
        {-M_PI_2, 0.0, 0.0},
        {M_PI_2, 0.0, 0.316},
        {M_PI_2, 0.0825, 0.0},
        {-M_PI_2, -0.0825, 0.384},
        {M_PI_2, 0.0, 0.0},
        {M_PI_2, 0.088, 0.0},
    };
    const double masses[7] = {4.97, 0.65, 3.23, 3.59, 1.23, 1.67, 1.7};
    const Vec3 coms[7] = {
        {0.0, -0.03, -0.09}, {0.0, -0.07, 0.03}, {0.03, 0.03, -0.07},
        {-0.05, 0.10, 0.03}, {0.0, 0.04, -0.12}, {0.06, 0.0, 0.01},
        {0.01, 0.0, 0.08},
    };
    const Vec3 inertias[7] = {
        {0.070, 0.070, 0.010}, {0.008, 0.003, 0.009}, {0.040, 0.028, 0.014},
        {0.030, 0.030, 0.011}, {0.025, 0.020, 0.009}, {0.002, 0.004, 0.005},
        {0.012, 0.010, 0.005},
    };
    const double efforts[7] = {87.0, 87.0, 87.0, 87.0, 12.0, 12.0, 12.0};
    const double lowers[7] = {-2.897, -1.763, -2.897, -3.072, -2.897, -0.018, -2.897};
    const double uppers[7] = {2.897, 1.763, 2.897, -0.070, 2.897, 3.752, 2.897};

    for (int i = 0; i < 7; ++i) {
        Joint j;
        j.origin.rotation = Eigen::AngleAxisd(rows[i].alpha, Vec3::UnitX()).toRotationMatrix();
        j.origin.translation = j.origin.rotation * Vec3(rows[i].a, 0.0, rows[i].d);
        j.axis = Vec3::UnitZ();
        j.mass = masses[i];
        j.com = coms[i];
        j.inertia = inertias[i].asDiagonal();
        j.effort_limit = efforts[i];
        j.position_lower = lowers[i];
        j.position_upper = uppers[i];
        model.joints.push_back(j);
    }
    // Flange plus a drill-length tool along the flange z-axis.
    model.ee_offset.translation = Vec3(0.0, 0.0, 0.107 + 0.12);
    return model;
}

}  // namespace eaic
