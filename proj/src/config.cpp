#include "eaic/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace eaic {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    os << "configuration invalid (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& issue : issues) {
        os << "\n  " << issue.key << ": " << issue.reason;
    }
    return os.str();
}

/// Strict reader over one JSON object: required keys are reported when
/// missing or mistyped, and any key never consumed is reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json* node, std::string path, std::vector<ConfigIssue>& issues)
        : node_(node && node->is_object() ? node : nullptr), path_(std::move(path)), issues_(issues) {}

    bool present() const { return node_ != nullptr; }

    double number(const std::string& key, double fallback, bool required = true) {
        consumed_.insert(key);
        const json* v = find(key);
        if (!v) {
            if (required) missing(key);
            return fallback;
        }
        if (!v->is_number()) {
            issues_.push_back({path(key), "expected a number"});
            return fallback;
        }
        const double value = v->get<double>();
        if (!std::isfinite(value)) {
            issues_.push_back({path(key), "must be finite"});
            return fallback;
        }
        return value;
    }

    std::string string(const std::string& key, std::string fallback, bool required = true) {
        consumed_.insert(key);
        const json* v = find(key);
        if (!v) {
            if (required) missing(key);
            return fallback;
        }
        if (!v->is_string()) {
            issues_.push_back({path(key), "expected a string"});
            return fallback;
        }
        return v->get<std::string>();
    }

    std::vector<double> number_array(const std::string& key, size_t expected_size, bool required = true) {
        consumed_.insert(key);
        const json* v = find(key);
        if (!v) {
            if (required) missing(key);
            return {};
        }
        if (!v->is_array()) {
            issues_.push_back({path(key), "expected an array of numbers"});
            return {};
        }
        std::vector<double> out;
        for (const auto& item : *v) {
            if (!item.is_number()) {
                issues_.push_back({path(key), "expected an array of numbers"});
                return {};
            }
            out.push_back(item.get<double>());
        }
        if (expected_size != 0 && out.size() != expected_size) {
            issues_.push_back({path(key), "expected " + std::to_string(expected_size) + " entries"});
            return {};
        }
        return out;
    }

    const json* array(const std::string& key) {
        consumed_.insert(key);
        const json* v = find(key);
        if (!v) {
            missing(key);
            return nullptr;
        }
        if (!v->is_array()) {
            issues_.push_back({path(key), "expected an array"});
            return nullptr;
        }
        return v;
    }

    ObjectReader object(const std::string& key, bool required = true) {
        consumed_.insert(key);
        const json* v = find(key);
        if (v && !v->is_object()) {
            issues_.push_back({path(key), "expected an object"});
            v = nullptr;
        } else if (!v && required && node_) {
            missing(key);
        }
        return ObjectReader(v, path(key), issues_);
    }

    void reject_unknown() {
        if (!node_) return;
        for (auto it = node_->begin(); it != node_->end(); ++it) {
            if (consumed_.find(it.key()) == consumed_.end()) {
                issues_.push_back({path(it.key()), "unknown key"});
            }
        }
    }

    void issue(const std::string& key, const std::string& reason) {
        issues_.push_back({path(key), reason});
    }

private:
    const json* find(const std::string& key) const {
        if (!node_) return nullptr;
        auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }
    void missing(const std::string& key) { issues_.push_back({path(key), "missing required key"}); }
    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* node_;
    std::string path_;
    std::vector<ConfigIssue>& issues_;
    std::set<std::string> consumed_;
};

Mat3 rotation_from_rpy(const Vec3& rpy) {
    return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
            Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
        .toRotationMatrix();
}

Vec3 rpy_from_rotation(const Mat3& r) {
    return r.eulerAngles(2, 1, 0).reverse();
}

Vec3 read_vec3(ObjectReader& reader, const std::string& key, const Vec3& fallback, bool required = true) {
    const auto values = reader.number_array(key, 3, required);
    if (values.size() != 3) return fallback;
    return Vec3(values[0], values[1], values[2]);
}

ChainModel read_custom_chain(ObjectReader& chain_reader, std::vector<ConfigIssue>& issues) {
    ChainModel model;
    model.name = "custom";
    model.gravity = read_vec3(chain_reader, "gravity", Vec3(0.0, 0.0, -9.80665), false);

    const json* joints = chain_reader.array("joints");
    if (joints) {
        int index = 0;
        for (const auto& item : *joints) {
            const std::string joint_path = "model.chain.joints[" + std::to_string(index) + "]";
            ObjectReader jr(&item, joint_path, issues);
            Joint joint;
            joint.axis = read_vec3(jr, "axis", Vec3::UnitZ());
            ObjectReader origin = jr.object("origin");
            joint.origin.translation = read_vec3(origin, "xyz", Vec3::Zero());
            joint.origin.rotation = rotation_from_rpy(read_vec3(origin, "rpy", Vec3::Zero()));
            origin.reject_unknown();
            joint.mass = jr.number("mass", 1.0);
            joint.com = read_vec3(jr, "com", Vec3::Zero());
            const auto inertia = jr.number_array("inertia", 6);
            if (inertia.size() == 6) {
                joint.inertia << inertia[0], inertia[3], inertia[4],
                                 inertia[3], inertia[1], inertia[5],
                                 inertia[4], inertia[5], inertia[2];
            }
            joint.effort_limit = jr.number("effort_limit", 1e9, false);
            joint.position_lower = jr.number("position_lower", -1e9, false);
            joint.position_upper = jr.number("position_upper", 1e9, false);
            jr.reject_unknown();
            const double axis_norm = joint.axis.norm();
            if (axis_norm > 1e-12) joint.axis /= axis_norm;
            model.joints.push_back(joint);
            ++index;
        }
    }
    ObjectReader ee = chain_reader.object("ee_offset", false);
    if (ee.present()) {
        model.ee_offset.translation = read_vec3(ee, "xyz", Vec3::Zero());
        model.ee_offset.rotation = rotation_from_rpy(read_vec3(ee, "rpy", Vec3::Zero()));
        ee.reject_unknown();
    }
    return model;
}

ScenarioConfig parse_and_validate(const json& root) {
    std::vector<ConfigIssue> issues;
    ScenarioConfig config;

    ObjectReader top(&root, "", issues);

    ObjectReader model = top.object("model");
    config.model.kind = model.string("kind", "");
    const auto q0 = model.number_array("q0", 0);
    if (config.model.kind == "custom") {
        ObjectReader chain = model.object("chain");
        if (chain.present()) {
            config.model.custom = read_custom_chain(chain, issues);
            chain.reject_unknown();
        }
    } else if (config.model.kind != "panda7" && config.model.kind != "planar3" &&
               !config.model.kind.empty()) {
        model.issue("kind", "must be one of panda7, planar3, custom");
    }
    model.reject_unknown();

    ObjectReader controller = top.object("controller");
    config.controller.kind = controller.string("kind", "");
    const std::string& kind = config.controller.kind;
    const bool is_impedance = kind == "impedance";
    const bool is_hybrid = kind == "hybrid";
    const bool is_energy_aware = kind == "energy_aware";
    if (!kind.empty() && !is_impedance && !is_hybrid && !is_energy_aware) {
        controller.issue("kind", "must be one of impedance, hybrid, energy_aware");
    }

    ObjectReader stiffness = controller.object("stiffness");
    config.controller.stiffness_translational = stiffness.number("translational", 900.0);
    config.controller.stiffness_rotational = stiffness.number("rotational", 40.0);
    config.controller.stiffness_coupling = stiffness.number("coupling", 0.0);
    stiffness.reject_unknown();
    if (config.controller.stiffness_translational <= 0.0) {
        controller.issue("stiffness.translational", "must be positive");
    }
    if (config.controller.stiffness_rotational < 0.0) {
        controller.issue("stiffness.rotational", "must be non-negative");
    }

    ObjectReader damping = controller.object("damping");
    config.controller.damping_initial = damping.number("initial", 5.0);
    damping.reject_unknown();
    if (config.controller.damping_initial <= 0.0) {
        controller.issue("damping.initial", "must be positive");
    }

    if (is_energy_aware || kind.empty()) {
        config.controller.energy_limit = controller.number("energy_limit", 0.7, is_energy_aware);
        config.controller.power_limit = controller.number("power_limit", 0.5, is_energy_aware);
        if (config.controller.energy_limit <= 0.0) controller.issue("energy_limit", "must be positive");
        if (config.controller.power_limit <= 0.0) controller.issue("power_limit", "must be positive");
    }
    if (is_hybrid) {
        ObjectReader force = controller.object("force");
        config.controller.desired_force_z = force.number("desired_z", -15.0);
        config.controller.force_gain = force.number("gain", 2.0);
        force.reject_unknown();
        if (config.controller.force_gain < 0.0) controller.issue("force.gain", "must be non-negative");
    }
    if (is_hybrid || is_energy_aware || kind.empty()) {
        ObjectReader tank = controller.object("tank", is_hybrid || is_energy_aware);
        const bool req = is_hybrid || is_energy_aware;
        config.controller.tank.initial = tank.number("initial", 3.0, req);
        config.controller.tank.upper = tank.number("upper", 5.0, req);
        config.controller.tank.lower = tank.number("lower", 0.5, req);
        config.controller.tank.extraction_limit = tank.number("extraction_limit", -0.175, req);
        tank.reject_unknown();
        if (req) {
            const TankConfig& t = config.controller.tank;
            if (t.lower >= t.upper) {
                controller.issue("tank.lower", "lower bound must be below the upper bound");
            } else if (t.initial < t.lower || t.initial > t.upper) {
                controller.issue("tank.initial", "must lie within [lower, upper]");
            }
            if (t.extraction_limit >= 0.0) {
                controller.issue("tank.extraction_limit", "must be negative");
            }
        }
    }
    controller.reject_unknown();

    ObjectReader world = top.object("world");
    config.world.dt = world.number("dt", 1e-3);
    if (config.world.dt <= 0.0) world.issue("dt", "must be positive");

    ObjectReader bench = world.object("bench");
    config.world.bench.stiffness = bench.number("stiffness", 1e5);
    config.world.bench.damping = bench.number("damping", 300.0);
    bench.reject_unknown();
    if (config.world.bench.stiffness <= 0.0) world.issue("bench.stiffness", "must be positive");
    if (config.world.bench.damping < 0.0) world.issue("bench.damping", "must be non-negative");

    ObjectReader screw = world.object("screw");
    config.world.screw.pitch = screw.number("pitch", 0.0008);
    config.world.screw.speed_rps = screw.number("speed_rps", 5.0);
    config.world.screw.engage_force = screw.number("engage_force", 15.0);
    config.world.screw.nominal_length = screw.number("nominal_length", 0.025);
    config.world.screw.actual_length = screw.number("actual_length", 0.015);
    config.world.screw.head_above_bench = screw.number("head_above_bench", 0.0);
    config.world.screw.support_stiffness = screw.number("support_stiffness", 1e5);
    config.world.screw.support_damping = screw.number("support_damping", 300.0);
    config.world.screw.progress_ratio = screw.number("progress_ratio", 0.8);
    screw.reject_unknown();
    if (config.world.screw.pitch <= 0.0) world.issue("screw.pitch", "must be positive");
    if (config.world.screw.engage_force <= 0.0) world.issue("screw.engage_force", "must be positive");
    if (config.world.screw.actual_length > config.world.screw.nominal_length) {
        world.issue("screw.actual_length", "must not exceed the nominal length");
    }
    if (config.world.screw.progress_ratio <= 0.0 || config.world.screw.progress_ratio > 1.0) {
        world.issue("screw.progress_ratio", "must lie in (0, 1]");
    }
    world.reject_unknown();

    ObjectReader scenario = top.object("scenario");
    config.scenario.engage_step = scenario.number("engage_step", 1e-4);
    config.scenario.press_margin = scenario.number("press_margin", 1.2);
    config.scenario.settle_after_plan = scenario.number("settle_after_plan", 1.5);
    config.scenario.final_settle = scenario.number("final_settle", 4.0);
    config.scenario.time_limit = scenario.number("time_limit", 120.0, false);
    if (config.scenario.engage_step <= 0.0) scenario.issue("engage_step", "must be positive");
    if (config.scenario.press_margin < 1.0) scenario.issue("press_margin", "must be at least 1");
    if (config.scenario.time_limit <= 0.0) scenario.issue("time_limit", "must be positive");

    ObjectReader disturbance = scenario.object("disturbance");
    config.scenario.disturbance.delay = disturbance.number("delay", 0.5);
    config.scenario.disturbance.ramp = disturbance.number("ramp", 1.5);
    config.scenario.disturbance.hold = disturbance.number("hold", 1.0);
    config.scenario.disturbance.direction = read_vec3(disturbance, "direction", Vec3::UnitX());
    config.scenario.disturbance.distance = disturbance.number("distance", 0.4);
    config.scenario.disturbance.stiffness = disturbance.number("stiffness", 1000.0);
    config.scenario.disturbance.damping = disturbance.number("damping", 20.0);
    config.scenario.disturbance.angular_damping = disturbance.number("angular_damping", 0.0, false);
    disturbance.reject_unknown();
    if (config.scenario.disturbance.angular_damping < 0.0) {
        scenario.issue("disturbance.angular_damping", "must be non-negative");
    }
    if (config.scenario.disturbance.ramp <= 0.0) scenario.issue("disturbance.ramp", "must be positive");
    if (config.scenario.disturbance.direction.norm() < 1e-9) {
        scenario.issue("disturbance.direction", "must be non-zero");
    } else {
        config.scenario.disturbance.direction.normalize();
    }
    scenario.reject_unknown();

    ObjectReader output = top.object("output", false);
    if (output.present()) {
        config.output.log = output.string("log", config.output.log, false);
        config.output.report = output.string("report", config.output.report, false);
        output.reject_unknown();
    }
    top.reject_unknown();

    // q0 length can only be checked against a buildable model.
    if (issues.empty()) {
        const ChainModel chain = config.make_model();
        chain.validate();
        if (q0.size() != static_cast<size_t>(chain.dof())) {
            issues.push_back({"model.q0", "expected " + std::to_string(chain.dof()) + " joint values"});
        } else {
            config.model.q0 = Eigen::Map<const VecX>(q0.data(), static_cast<Eigen::Index>(q0.size()));
        }
    }

    if (!issues.empty()) throw config_error(std::move(issues));
    return config;
}

}  // namespace

config_error::config_error(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ChainModel ScenarioConfig::make_model() const {
    if (model.kind == "panda7") return ChainModel::panda7();
    if (model.kind == "planar3") return ChainModel::planar3();
    if (model.kind == "custom" && model.custom) return *model.custom;
    throw std::logic_error("ScenarioConfig::make_model: unresolved model kind");
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(std::vector<ConfigIssue>{{path, "cannot open file"}});
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ScenarioConfig parse_config(const std::string& json_text) {
    json root = json::object();
    const bool blank = json_text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank) {
        try {
            root = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw config_error({{"<file>", std::string("invalid JSON: ") + e.what()}});
        }
        if (!root.is_object()) {
            throw config_error(std::vector<ConfigIssue>{{"<file>", "top level must be a JSON object"}});
        }
    }
    return parse_and_validate(root);
}

std::string serialize_config(const ScenarioConfig& config) {
    json root;
    root["model"]["kind"] = config.model.kind;
    root["model"]["q0"] = std::vector<double>(config.model.q0.data(),
                                              config.model.q0.data() + config.model.q0.size());
    if (config.model.kind == "custom" && config.model.custom) {
        const ChainModel& chain = *config.model.custom;
        json joints = json::array();
        for (const Joint& joint : chain.joints) {
            json j;
            j["axis"] = {joint.axis.x(), joint.axis.y(), joint.axis.z()};
            j["origin"]["xyz"] = {joint.origin.translation.x(), joint.origin.translation.y(),
                                  joint.origin.translation.z()};
            const Vec3 rpy = rpy_from_rotation(joint.origin.rotation);
            j["origin"]["rpy"] = {rpy.x(), rpy.y(), rpy.z()};
            j["mass"] = joint.mass;
            j["com"] = {joint.com.x(), joint.com.y(), joint.com.z()};
            j["inertia"] = {joint.inertia(0, 0), joint.inertia(1, 1), joint.inertia(2, 2),
                            joint.inertia(0, 1), joint.inertia(0, 2), joint.inertia(1, 2)};
            j["effort_limit"] = joint.effort_limit;
            j["position_lower"] = joint.position_lower;
            j["position_upper"] = joint.position_upper;
            joints.push_back(j);
        }
        root["model"]["chain"]["joints"] = joints;
        root["model"]["chain"]["gravity"] = {chain.gravity.x(), chain.gravity.y(), chain.gravity.z()};
        root["model"]["chain"]["ee_offset"]["xyz"] = {chain.ee_offset.translation.x(),
                                                      chain.ee_offset.translation.y(),
                                                      chain.ee_offset.translation.z()};
        const Vec3 ee_rpy = rpy_from_rotation(chain.ee_offset.rotation);
        root["model"]["chain"]["ee_offset"]["rpy"] = {ee_rpy.x(), ee_rpy.y(), ee_rpy.z()};
    }

    json& ctrl = root["controller"];
    ctrl["kind"] = config.controller.kind;
    ctrl["stiffness"]["translational"] = config.controller.stiffness_translational;
    ctrl["stiffness"]["rotational"] = config.controller.stiffness_rotational;
    ctrl["stiffness"]["coupling"] = config.controller.stiffness_coupling;
    ctrl["damping"]["initial"] = config.controller.damping_initial;
    if (config.controller.kind == "energy_aware") {
        ctrl["energy_limit"] = config.controller.energy_limit;
        ctrl["power_limit"] = config.controller.power_limit;
    }
    if (config.controller.kind == "hybrid") {
        ctrl["force"]["desired_z"] = config.controller.desired_force_z;
        ctrl["force"]["gain"] = config.controller.force_gain;
    }
    if (config.controller.kind == "energy_aware" || config.controller.kind == "hybrid") {
        ctrl["tank"]["initial"] = config.controller.tank.initial;
        ctrl["tank"]["upper"] = config.controller.tank.upper;
        ctrl["tank"]["lower"] = config.controller.tank.lower;
        ctrl["tank"]["extraction_limit"] = config.controller.tank.extraction_limit;
    }

    json& world = root["world"];
    world["dt"] = config.world.dt;
    world["bench"]["stiffness"] = config.world.bench.stiffness;
    world["bench"]["damping"] = config.world.bench.damping;
    world["screw"]["pitch"] = config.world.screw.pitch;
    world["screw"]["speed_rps"] = config.world.screw.speed_rps;
    world["screw"]["engage_force"] = config.world.screw.engage_force;
    world["screw"]["nominal_length"] = config.world.screw.nominal_length;
    world["screw"]["actual_length"] = config.world.screw.actual_length;
    world["screw"]["head_above_bench"] = config.world.screw.head_above_bench;
    world["screw"]["support_stiffness"] = config.world.screw.support_stiffness;
    world["screw"]["support_damping"] = config.world.screw.support_damping;
    world["screw"]["progress_ratio"] = config.world.screw.progress_ratio;

    json& scenario = root["scenario"];
    scenario["engage_step"] = config.scenario.engage_step;
    scenario["press_margin"] = config.scenario.press_margin;
    scenario["settle_after_plan"] = config.scenario.settle_after_plan;
    scenario["final_settle"] = config.scenario.final_settle;
    scenario["time_limit"] = config.scenario.time_limit;
    scenario["disturbance"]["delay"] = config.scenario.disturbance.delay;
    scenario["disturbance"]["ramp"] = config.scenario.disturbance.ramp;
    scenario["disturbance"]["hold"] = config.scenario.disturbance.hold;
    scenario["disturbance"]["direction"] = {config.scenario.disturbance.direction.x(),
                                            config.scenario.disturbance.direction.y(),
                                            config.scenario.disturbance.direction.z()};
    scenario["disturbance"]["distance"] = config.scenario.disturbance.distance;
    scenario["disturbance"]["stiffness"] = config.scenario.disturbance.stiffness;
    scenario["disturbance"]["damping"] = config.scenario.disturbance.damping;
    scenario["disturbance"]["angular_damping"] = config.scenario.disturbance.angular_damping;

    root["output"]["log"] = config.output.log;
    root["output"]["report"] = config.output.report;

    return root.dump(2) + "\n";
}

}  // namespace eaic
