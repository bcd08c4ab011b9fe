#include "reflex/config.hpp"

#include <fstream>

namespace reflex {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* section) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown key '" + item.key() + "' in " + section);
    }
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  if (!obj[key].is_number()) {
    throw ParseError(std::string("expected a number for '") + key + "'");
  }
  return obj[key].get<double>();
}

Eigen::Vector2d get_pair(const json& obj, const char* key,
                         const Eigen::Vector2d& fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json& arr = obj[key];
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() ||
      !arr[1].is_number()) {
    throw ParseError(std::string("expected [a, b] for '") + key + "'");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

SensingMode parse_sensing(const json& obj) {
  check_keys(obj, {"mode", "f_s", "e_s"}, "params.sensing");
  const std::string mode = obj.value("mode", "force");
  if (mode == "force") {
    return ForceThreshold{get_number(obj, "f_s", 3.0)};
  }
  if (mode == "position-error") {
    return PositionErrorThreshold{get_number(obj, "e_s", 0.03)};
  }
  throw ParseError("sensing mode must be 'force' or 'position-error'");
}

json dump_sensing(const SensingMode& mode) {
  if (const auto* force = std::get_if<ForceThreshold>(&mode)) {
    return {{"mode", "force"}, {"f_s", force->f_s}};
  }
  const auto& pos = std::get<PositionErrorThreshold>(mode);
  return {{"mode", "position-error"}, {"e_s", pos.e_s}};
}

MotorSpec parse_motor_spec(const json& value) {
  if (value.is_string()) {
    return motor_by_name(value.get<std::string>());
  }
  check_keys(value,
             {"name", "stator_od", "stack_height", "rotor_inertia", "tau_c",
              "tau_p", "gear_ratio"},
             "motor.reference");
  MotorSpec spec;
  spec.name = value.value("name", "custom");
  spec.stator_od = get_number(value, "stator_od", 0.0);
  spec.stack_height = get_number(value, "stack_height", 0.0);
  spec.rotor_inertia = get_number(value, "rotor_inertia", 0.0);
  spec.tau_c = get_number(value, "tau_c", 0.0);
  spec.tau_p = get_number(value, "tau_p", 0.0);
  spec.gear_ratio = get_number(value, "gear_ratio", 1.0);
  return spec;
}

json dump_motor_spec(const MotorSpec& spec) {
  for (const char* name : {"m1", "m2", "m3"}) {
    if (spec.name == name) {
      return json(spec.name);
    }
  }
  return {{"name", spec.name},
          {"stator_od", spec.stator_od},
          {"stack_height", spec.stack_height},
          {"rotor_inertia", spec.rotor_inertia},
          {"tau_c", spec.tau_c},
          {"tau_p", spec.tau_p},
          {"gear_ratio", spec.gear_ratio}};
}

SweepAxis parse_axis(const json& obj) {
  check_keys(obj, {"variable", "min", "max", "count", "spacing"},
             "sweep.axes[]");
  SweepAxis axis;
  axis.variable = variable_from_name(obj.value("variable", "v_0"));
  axis.min = get_number(obj, "min", 0.0);
  axis.max = get_number(obj, "max", 0.0);
  axis.count = static_cast<int>(get_number(obj, "count", 0.0));
  const std::string spacing = obj.value("spacing", "linear");
  if (spacing != "linear" && spacing != "log") {
    throw ParseError("axis spacing must be 'linear' or 'log'");
  }
  axis.log_spacing = spacing == "log";
  return axis;
}

json dump_axis(const SweepAxis& axis) {
  return {{"variable", variable_name(axis.variable)},
          {"min", axis.min},
          {"max", axis.max},
          {"count", axis.count},
          {"spacing", axis.log_spacing ? "log" : "linear"}};
}

}  // namespace

RunConfig default_config() {
  RunConfig config;
  config.params = CollisionParams1D{0.1,  1.0, 1000.0, 100.0,
                                    ForceThreshold{3.0}, 0.5, 10.0};
  config.motor = MotorScalingContext{motor_m2(),
                                     law_by_name("electrical-thermal"),
                                     motor_m2().output_peak_torque(), 0.1143};
  config.model = default_two_link();
  config.sweep_axes = {
      SweepAxis{SweepVariable::kV0, 0.05, 3.0, 40, true},
      SweepAxis{SweepVariable::kMotorRadius, 0.01, 0.1, 40, true},
  };
  config.sim = SimOptions{};
  return config;
}

RunConfig load_config(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ParseError("config root must be a JSON object");
  }
  check_keys(doc, {"params", "motor", "model", "sweep", "sim", "io"},
             "config");
  RunConfig config = default_config();

  if (doc.contains("params")) {
    const json& p = doc["params"];
    check_keys(p, {"m_f", "m_r", "k_m", "k_s", "v_0", "f_a", "sensing"},
               "params");
    config.params.m_f = get_number(p, "m_f", config.params.m_f);
    config.params.m_r = get_number(p, "m_r", config.params.m_r);
    config.params.k_m = get_number(p, "k_m", config.params.k_m);
    config.params.k_s = get_number(p, "k_s", config.params.k_s);
    config.params.v_0 = get_number(p, "v_0", config.params.v_0);
    config.params.f_a = get_number(p, "f_a", config.params.f_a);
    if (p.contains("sensing")) {
      config.params.sensing = parse_sensing(p["sensing"]);
    }
  }

  if (doc.contains("motor")) {
    const json& m = doc["motor"];
    check_keys(m, {"reference", "law", "torque_floor", "link_length"},
               "motor");
    if (m.contains("reference")) {
      config.motor.reference = parse_motor_spec(m["reference"]);
    }
    if (m.contains("law")) {
      config.motor.law = law_by_name(m["law"].get<std::string>());
    }
    config.motor.torque_floor =
        get_number(m, "torque_floor", config.motor.reference.output_peak_torque());
    config.motor.link_length =
        get_number(m, "link_length", config.motor.link_length);
  }

  if (doc.contains("model")) {
    const json& m = doc["model"];
    check_keys(m,
               {"l1", "l2", "link_mass", "link_com", "link_inertia",
                "joint_inertia", "joint_stiffness", "tau_max",
                "contact_stiffness", "sensing_rule"},
               "model");
    TwoLinkModel& model = config.model;
    model.l1 = get_number(m, "l1", model.l1);
    model.l2 = get_number(m, "l2", model.l2);
    // Omitted inertial entries follow the uniform-rod defaults for the
    // (possibly overridden) lengths and masses.
    const Eigen::Vector2d mass = get_pair(
        m, "link_mass", {model.link1.mass, model.link2.mass});
    model.link1 = uniform_rod(mass(0), model.l1);
    model.link2 = uniform_rod(mass(1), model.l2);
    const Eigen::Vector2d com =
        get_pair(m, "link_com", {model.link1.com_offset,
                                 model.link2.com_offset});
    model.link1.com_offset = com(0);
    model.link2.com_offset = com(1);
    const Eigen::Vector2d inertia =
        get_pair(m, "link_inertia", {model.link1.inertia_about_joint,
                                     model.link2.inertia_about_joint});
    model.link1.inertia_about_joint = inertia(0);
    model.link2.inertia_about_joint = inertia(1);
    model.joint_inertia = get_pair(m, "joint_inertia", model.joint_inertia);
    model.joint_stiffness =
        get_pair(m, "joint_stiffness", model.joint_stiffness);
    model.tau_max = get_pair(m, "tau_max", model.tau_max);
    model.contact_stiffness =
        get_number(m, "contact_stiffness", model.contact_stiffness);
    if (m.contains("sensing_rule")) {
      const std::string rule = m["sensing_rule"].get<std::string>();
      if (rule == "projection") {
        model.sensing_rule = SensingStiffnessRule::kProjectionOnly;
      } else if (rule == "series") {
        model.sensing_rule = SensingStiffnessRule::kSeriesWithContact;
      } else {
        throw ParseError("sensing_rule must be 'projection' or 'series'");
      }
    }
  }

  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    check_keys(s, {"axes"}, "sweep");
    if (s.contains("axes")) {
      if (!s["axes"].is_array() || s["axes"].empty() || s["axes"].size() > 2) {
        throw ParseError("sweep.axes must list 1 or 2 axes");
      }
      config.sweep_axes.clear();
      for (const json& axis : s["axes"]) {
        config.sweep_axes.push_back(parse_axis(axis));
      }
    }
  }

  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    check_keys(s,
               {"dt", "t_max", "spike", "contact_stiffness", "noise_sigma",
                "seed", "lead_in", "tail", "latency"},
               "sim");
    config.sim.dt = get_number(s, "dt", config.sim.dt);
    config.sim.t_max = get_number(s, "t_max", config.sim.t_max);
    if (s.contains("spike")) {
      const std::string spike = s["spike"].get<std::string>();
      if (spike == "half-sine") {
        config.sim.spike = SpikeModel::kHalfSine;
      } else if (spike == "instantaneous") {
        config.sim.spike = SpikeModel::kInstantaneous;
      } else {
        throw ParseError("spike must be 'half-sine' or 'instantaneous'");
      }
    }
    config.sim.contact_stiffness =
        get_number(s, "contact_stiffness", config.sim.contact_stiffness);
    config.sim.noise_sigma =
        get_number(s, "noise_sigma", config.sim.noise_sigma);
    config.sim.seed = static_cast<std::uint64_t>(
        get_number(s, "seed", static_cast<double>(config.sim.seed)));
    config.sim.lead_in = get_number(s, "lead_in", config.sim.lead_in);
    config.sim.tail = get_number(s, "tail", config.sim.tail);
    config.sim.latency = get_number(s, "latency", config.sim.latency);
  }

  if (doc.contains("io")) {
    const json& io = doc["io"];
    check_keys(io, {"out", "format"}, "io");
    config.out_path = io.value("out", "");
    config.out_format = io.value("format", "");
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return load_config(doc);
}

nlohmann::json dump_config(const RunConfig& config) {
  json axes = json::array();
  for (const auto& axis : config.sweep_axes) {
    axes.push_back(dump_axis(axis));
  }
  return {
      {"params",
       {{"m_f", config.params.m_f},
        {"m_r", config.params.m_r},
        {"k_m", config.params.k_m},
        {"k_s", config.params.k_s},
        {"v_0", config.params.v_0},
        {"f_a", config.params.f_a},
        {"sensing", dump_sensing(config.params.sensing)}}},
      {"motor",
       {{"reference", dump_motor_spec(config.motor.reference)},
        {"law", config.motor.law.name},
        {"torque_floor", config.motor.torque_floor},
        {"link_length", config.motor.link_length}}},
      {"model",
       {{"l1", config.model.l1},
        {"l2", config.model.l2},
        {"link_mass", {config.model.link1.mass, config.model.link2.mass}},
        {"link_com",
         {config.model.link1.com_offset, config.model.link2.com_offset}},
        {"link_inertia",
         {config.model.link1.inertia_about_joint,
          config.model.link2.inertia_about_joint}},
        {"joint_inertia",
         {config.model.joint_inertia(0), config.model.joint_inertia(1)}},
        {"joint_stiffness",
         {config.model.joint_stiffness(0), config.model.joint_stiffness(1)}},
        {"tau_max", {config.model.tau_max(0), config.model.tau_max(1)}},
        {"contact_stiffness", config.model.contact_stiffness},
        {"sensing_rule",
         config.model.sensing_rule == SensingStiffnessRule::kProjectionOnly
             ? "projection"
             : "series"}}},
      {"sweep", {{"axes", axes}}},
      {"sim",
       {{"dt", config.sim.dt},
        {"t_max", config.sim.t_max},
        {"spike", config.sim.spike == SpikeModel::kHalfSine ? "half-sine"
                                                            : "instantaneous"},
        {"contact_stiffness", config.sim.contact_stiffness},
        {"noise_sigma", config.sim.noise_sigma},
        {"seed", config.sim.seed},
        {"lead_in", config.sim.lead_in},
        {"tail", config.sim.tail},
        {"latency", config.sim.latency}}},
      {"io", {{"out", config.out_path}, {"format", config.out_format}}},
  };
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParseError("override must look like section.key=value: " +
                     assignment);
  }
  std::string pointer = "/" + assignment.substr(0, eq);
  for (char& c : pointer) {
    if (c == '.') {
      c = '/';
    }
  }
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  doc[json::json_pointer(pointer)] = value;
}

}  // namespace reflex
