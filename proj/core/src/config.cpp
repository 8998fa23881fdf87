#include "aerocap/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace aerocap {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long as_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(path, "expected an integer");
}

Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return Vec3(as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]"), as_double(j[2], path + "[2]"));
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Reads fields out of one JSON object and remembers which keys it consumed.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void field(const char* key, double& v) {
    if (const json* j = find(key)) v = as_double(*j, join(path_, key));
  }
  void field(const char* key, int& v) {
    if (const json* j = find(key)) {
      const long long x = as_int(*j, join(path_, key));
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        fail(join(path_, key), "integer out of range");
      v = static_cast<int>(x);
    }
  }
  void field(const char* key, std::uint64_t& v) {
    if (const json* j = find(key)) {
      if (j->is_number_unsigned()) v = j->get<std::uint64_t>();
      else if (j->is_number_integer()) fail(join(path_, key), "expected a non-negative integer");
      else v = static_cast<std::uint64_t>(as_int(*j, join(path_, key)));
    }
  }
  void field(const char* key, bool& v) {
    if (const json* j = find(key)) {
      if (!j->is_boolean()) fail(join(path_, key), "expected true or false");
      v = j->get<bool>();
    }
  }
  void field(const char* key, std::string& v) {
    if (const json* j = find(key)) {
      if (!j->is_string()) fail(join(path_, key), "expected a string");
      v = j->get<std::string>();
    }
  }
  void field(const char* key, Vec3& v) {
    if (const json* j = find(key)) v = as_vec3(*j, join(path_, key));
  }
  void field(const char* key, GridDims& v) {
    if (const json* j = find(key)) {
      const std::string p = join(path_, key);
      if (!j->is_array() || j->size() != 3) fail(p, "expected [nx, ny, nz]");
      v = GridDims{static_cast<int>(as_int((*j)[0], p + "[0]")), static_cast<int>(as_int((*j)[1], p + "[1]")),
                   static_cast<int>(as_int((*j)[2], p + "[2]"))};
    }
  }
  void field(const char* key, std::vector<Vec3>& v) {
    if (const json* j = find(key)) {
      const std::string p = join(path_, key);
      if (!j->is_array()) fail(p, "expected an array of [x, y, z] points");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) v.push_back(as_vec3((*j)[i], p + "[" + std::to_string(i) + "]"));
    }
  }
  void field(const char* key, std::vector<double>& v) {
    if (const json* j = find(key)) {
      const std::string p = join(path_, key);
      if (!j->is_array()) fail(p, "expected an array of numbers");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) v.push_back(as_double((*j)[i], p + "[" + std::to_string(i) + "]"));
    }
  }
  void field(const char* key, std::vector<Box>& v) {
    if (const json* j = find(key)) {
      const std::string p = join(path_, key);
      if (!j->is_array()) fail(p, "expected an array of boxes");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) {
        Reader r((*j)[i], p + "[" + std::to_string(i) + "]");
        Box b;
        r.field("lo", b.lo);
        r.field("hi", b.hi);
        r.field("occupancy", b.occupancy);
        r.finish();
        v.push_back(b);
      }
    }
  }
  void field(const char* key, ActorKind& v) {
    if (const json* j = find(key)) {
      if (!j->is_string()) fail(join(path_, key), "expected a string");
      try {
        v = actor_kind_from_string(j->get<std::string>());
      } catch (const InvalidArgument& e) {
        fail(join(path_, key), e.what());
      }
    }
  }
  void degrees(const char* key, double& radians) {
    double deg = rad_to_deg(radians);
    if (find(key)) {
      field(key, deg);
      radians = deg_to_rad(deg);
    }
  }
  template <typename Fn>
  void section(const char* key, Fn&& fn) {
    if (const json* j = find(key)) {
      Reader r(*j, join(path_, key));
      fn(r);
      r.finish();
    }
  }

  void finish() const {
    for (const auto& [k, unused] : obj_.items())
      if (!used_.count(k)) fail(join(path_, k), "unknown key");
  }

 private:
  const json* find(const char* key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

class Writer {
 public:
  template <typename T>
  void field(const char* key, const T& v) {
    out[key] = v;
  }
  void field(const char* key, const Vec3& v) { out[key] = vec3_json(v); }
  void field(const char* key, const GridDims& v) { out[key] = json::array({v.nx, v.ny, v.nz}); }
  void field(const char* key, const std::vector<Vec3>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back(vec3_json(p));
    out[key] = std::move(a);
  }
  void field(const char* key, const std::vector<Box>& v) {
    json a = json::array();
    for (const auto& b : v) a.push_back({{"lo", vec3_json(b.lo)}, {"hi", vec3_json(b.hi)}, {"occupancy", b.occupancy}});
    out[key] = std::move(a);
  }
  void field(const char* key, const ActorKind& v) { out[key] = to_string(v); }
  void degrees(const char* key, const double& radians) { out[key] = rad_to_deg(radians); }
  template <typename Fn>
  void section(const char* key, Fn&& fn) {
    Writer w;
    fn(w);
    out[key] = std::move(w.out);
  }

  json out = json::object();
};

// Single description of the document layout, shared by reading and writing.
template <typename V, typename C>
void visit(V& v, C& c) {
  auto& s = c.scenario;
  v.section("world", [&](auto& w) {
    w.field("origin", s.world.origin);
    w.field("voxel_size", s.world.voxel_size);
    w.field("dims", s.world.dims);
    w.field("boxes", s.world.boxes);
    w.field("grid_file", s.world.grid_file);
    w.field("occupancy_threshold", s.world.occupancy_threshold);
    w.field("out_of_bounds", s.world.out_of_bounds);
  });
  v.section("actor", [&](auto& w) {
    w.field("kind", s.actor.kind);
    w.field("waypoints", s.actor.waypoints);
    w.field("speed", s.actor.speed);
    w.field("loop", s.actor.loop);
    w.field("sway_amplitude", s.actor.sway_amplitude);
    w.field("sway_period", s.actor.sway_period);
    w.degrees("heading_deg", s.actor.heading);
    w.field("jump_interval", s.actor.jump_interval);
    w.field("max_speed", s.actor.max_speed);
    w.field("arena_half_size", s.actor.arena_half_size);
  });
  v.section("formation", [&](auto& w) {
    w.field("n", s.formation.n);
    w.field("rho", s.formation.rho_form);
    w.degrees("tilt_deg", s.formation.phi_form);
    w.field("r_max", s.formation.r_max);
  });
  v.section("weights", [&](auto& w) {
    w.field("occlusion", s.formation.weights.occlusion);
    w.field("obstacle", s.formation.weights.obstacle);
    w.field("formation", s.formation.weights.formation);
  });
  v.section("planner", [&](auto& w) {
    w.field("yaw_cells", s.planner.grid.yaw_cells);
    w.field("tilt_cells", s.planner.grid.tilt_cells);
    w.field("range_cells", s.planner.grid.range_cells);
    w.field("samples_per_cell", s.planner.grid.samples_per_cell);
    w.field("quadrature_samples", s.planner.grid.quadrature_samples);
    w.field("neighbor_radius", s.planner.neighbor_radius);
    w.field("horizon", s.planner.horizon);
    w.field("dt", s.planner.dt);
    w.field("clearance", s.planner.clearance);
  });
  v.section("local_planner", [&](auto& w) {
    w.field("dt_fine", s.dt_fine);
    w.field("clearance", s.local.clearance);
    w.field("separation_weight", s.local.separation_weight);
    w.field("min_separation", s.local.min_separation);
    w.field("eta", s.local.eta);
    w.field("max_iters", s.local.max_iters);
    w.field("max_backtracks", s.local.max_backtracks);
    w.field("relative_tolerance", s.local.relative_tolerance);
    w.field("quadrature_samples", s.local.quadrature_samples);
    w.field("covariant", s.local.covariant);
  });
  v.section("kalman", [&](auto& w) {
    w.field("accel_sigma", s.kalman.accel_sigma);
    w.field("position_sigma", s.kalman.position_sigma);
  });
  v.section("camera", [&](auto& w) {
    w.field("fx", s.intrinsics.fx);
    w.field("fy", s.intrinsics.fy);
    w.field("cx", s.intrinsics.cx);
    w.field("cy", s.intrinsics.cy);
    w.field("width", s.intrinsics.width);
    w.field("height", s.intrinsics.height);
  });
  v.section("noise", [&](auto& w) {
    w.field("pixel_sigma", s.noise.pixel_sigma);
    w.field("pose_position_sigma", s.noise.pose_position_sigma);
    w.degrees("pose_rotation_sigma_deg", s.noise.pose_rotation_sigma);
    w.field("miss_base_rate", s.noise.miss_base_rate);
    w.field("miss_tilt_gain", s.noise.miss_tilt_gain);
    w.field("swap_rate", s.noise.swap_rate);
  });
  v.section("detector", [&](auto& w) {
    w.field("occlusion_threshold", s.detector.occlusion_threshold);
    w.field("quadrature_samples", s.detector.quadrature_samples);
  });
  v.section("run", [&](auto& w) {
    w.field("duration", s.duration);
    w.field("capture_rate", s.capture_rate);
    w.field("central_rate", s.central_rate);
    w.field("local_rate", s.local_rate);
    w.degrees("theta0_deg", s.theta0);
    w.field("adaptive", s.adaptive);
    w.field("safety_margin", s.safety_margin);
    w.field("execution_sigma", s.execution_sigma);
    w.field("seed", s.seed);
  });
  v.section("sweep", [&](auto& w) {
    w.field("noise_levels", c.sweep.noise_levels);
    w.field("seeds", c.sweep.seeds);
    w.field("base_seed", c.sweep.base_seed);
    w.field("jobs", c.sweep.jobs);
  });
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
  if (name == "default") return default_scenario();
  if (name == "mound") return mound_scenario();
  throw ConfigError("preset: unknown preset '" + name + "' (expected default or mound)");
}

Config config_from_json(const json& doc) {
  Reader root(doc, "");
  int version = kConfigSchemaVersion;
  root.field("schema_version", version);
  if (version != kConfigSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                               std::to_string(kConfigSchemaVersion) + ")");
  Config c;
  root.field("preset", c.preset);
  c.scenario = preset_scenario(c.preset);
  visit(root, c);
  root.finish();
  c.scenario.local.weights = c.scenario.formation.weights;
  c.scenario.noise.rng_seed = c.scenario.seed;
  try {
    c.scenario.validate();
    c.sweep.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const Config& config) {
  Config copy = config;
  Writer w;
  w.field("schema_version", kConfigSchemaVersion);
  w.field("preset", copy.preset);
  visit(w, copy);
  return w.out;
}

}  // namespace aerocap
