#pragma once

#include <cstdint>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymflat/charges/extrapolation.hpp"
#include "asymflat/core/errors.hpp"
#include "asymflat/initial_data/family.hpp"

namespace asymflat::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& task_types() {
  static const std::vector<std::string> t{"charges",    "intrinsic",      "center-identity",
                                          "sobolev",    "continuity",     "transform-check",
                                          "rt-check",   "foliation",      "eigen"};
  return t;
}

struct TaskSpec {
  std::string type;
  Json params;          // the task object as written
  std::string pointer;  // "/tasks/<i>"
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  DataFamily family;
  RadiusSchedule schedule;
  int lmax = 16;
  bool force_rt = false;
  std::string output = "out";
  std::vector<TaskSpec> tasks;
  Json raw;  // the file as parsed, key order preserved
};

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& ptr, const std::string& msg) {
  throw ConfigError((ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

inline void require_object(const Json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
}

inline void only_keys(const Json& j, const std::string& ptr, const std::set<std::string>& allowed) {
  require_object(j, ptr);
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(ptr + "/" + k, "unknown key '" + k + "'");
}

inline double number(const Json& j, const std::string& key, const std::string& ptr, double dflt) {
  if (!j.contains(key)) return dflt;
  const Json& v = j.at(key);
  if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
  return v.get<double>();
}

inline double required_number(const Json& j, const std::string& key, const std::string& ptr) {
  if (!j.contains(key)) fail(ptr + "/" + key, "required key is missing");
  return number(j, key, ptr, 0.0);
}

inline int integer(const Json& j, const std::string& key, const std::string& ptr, int dflt) {
  if (!j.contains(key)) return dflt;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(ptr + "/" + key, "expected an integer");
  return v.get<int>();
}

inline bool boolean(const Json& j, const std::string& key, const std::string& ptr, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) fail(ptr + "/" + key, "expected true or false");
  return j.at(key).get<bool>();
}

inline std::string string(const Json& j, const std::string& key, const std::string& ptr,
                          const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) fail(ptr + "/" + key, "expected a string");
  return j.at(key).get<std::string>();
}

inline Vec3 vec3(const Json& j, const std::string& key, const std::string& ptr, Vec3 dflt = {}) {
  if (!j.contains(key)) return dflt;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) fail(ptr + "/" + key, "expected an array of 3 numbers");
  Vec3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(ptr + "/" + key + "/" + std::to_string(i), "expected a number");
    out[i] = v[i].get<double>();
  }
  return out;
}

inline Mat3 mat3(const Json& j, const std::string& key, const std::string& ptr, Mat3 dflt = {}) {
  if (!j.contains(key)) return dflt;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) fail(ptr + "/" + key, "expected a 3x3 array");
  Mat3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string row = ptr + "/" + key + "/" + std::to_string(i);
    if (!v[i].is_array() || v[i].size() != 3) fail(row, "expected an array of 3 numbers");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!v[i][k].is_number()) fail(row + "/" + std::to_string(k), "expected a number");
      out[i][k] = v[i][k].get<double>();
    }
  }
  return out;
}

inline std::vector<double> numbers(const Json& j, const std::string& key, const std::string& ptr,
                                   std::vector<double> dflt) {
  if (!j.contains(key)) return dflt;
  const Json& v = j.at(key);
  if (!v.is_array()) fail(ptr + "/" + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(ptr + "/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline void check_q(const Json& j, const std::string& ptr) {
  if (j.contains("q")) {
    const double q = number(j, "q", ptr, 1.0);
    if (!(q > 0.5))
      fail(ptr + "/q", "decay rate must satisfy q > 1/2 for the charges to exist (got " +
                           std::to_string(q) + ")");
  }
}

}  // namespace detail

/// Builds a data family from its JSON description.
inline DataFamily parse_family(const Json& j, const std::string& ptr) {
  using namespace detail;
  require_object(j, ptr);
  if (!j.contains("kind")) fail(ptr + "/kind", "required key is missing");
  const std::string kind = string(j, "kind", ptr, "");
  check_q(j, ptr);
  try {
    if (kind == "flat") {
      only_keys(j, ptr, {"kind"});
      return make_flat();
    }
    if (kind == "schwarzschild") {
      only_keys(j, ptr, {"kind", "mass", "center", "q", "R0"});
      return make_schwarzschild(number(j, "mass", ptr, 1.0), vec3(j, "center", ptr),
                                number(j, "q", ptr, 1.0), number(j, "R0", ptr, 1.0));
    }
    if (kind == "harmonic") {
      only_keys(j, ptr, {"kind", "monopole", "dipole", "quadrupole", "shift_monopole",
                         "shift_dipole", "q", "R0"});
      HarmonicAsymptotics h;
      h.monopole = number(j, "monopole", ptr, 0.5);
      h.dipole = vec3(j, "dipole", ptr);
      h.quadrupole = mat3(j, "quadrupole", ptr);
      h.shift_monopole = vec3(j, "shift_monopole", ptr);
      h.shift_dipole = mat3(j, "shift_dipole", ptr);
      return make_harmonic(h, number(j, "q", ptr, 1.0), number(j, "R0", ptr, 5.0));
    }
    if (kind == "kerr") {
      only_keys(j, ptr, {"kind", "mass", "spin", "R0"});
      return make_kerr(number(j, "mass", ptr, 1.0), number(j, "spin", ptr, 0.0),
                       number(j, "R0", ptr, 0.0));
    }
    if (kind == "rt_violating") {
      only_keys(j, ptr, {"kind", "q", "amp", "dir", "mass", "R0"});
      return make_rt_violating(number(j, "q", ptr, 0.75), number(j, "amp", ptr, 1.0),
                               vec3(j, "dir", ptr, {0, 0, 1}), number(j, "mass", ptr, 1.0),
                               number(j, "R0", ptr, 5.0));
    }
    if (kind == "perturbed") {
      only_keys(j, ptr, {"kind", "base", "eps", "profile", "q", "R0"});
      if (!j.contains("base")) fail(ptr + "/base", "required key is missing");
      const DataFamily base = parse_family(j.at("base"), ptr + "/base");
      Profile prof;
      try {
        prof = profile_from_name(string(j, "profile", ptr, "quadrupole"));
      } catch (const ConfigError& e) {
        fail(ptr + "/profile", e.what());
      }
      return make_perturbed(base, required_number(j, "eps", ptr), prof,
                            number(j, "q", ptr, 0.0), number(j, "R0", ptr, 0.0));
    }
    if (kind == "rigid_motion") {
      only_keys(j, ptr, {"kind", "base", "rotation", "shift"});
      if (!j.contains("base")) fail(ptr + "/base", "required key is missing");
      return make_rigid_motion(parse_family(j.at("base"), ptr + "/base"),
                               mat3(j, "rotation", ptr, Mat3::identity()), vec3(j, "shift", ptr));
    }
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    if (!w.empty() && w[0] == '/') throw;
    fail(ptr, w);
  } catch (const InputError& e) {
    fail(ptr, e.what());
  }
  fail(ptr + "/kind", "unknown family kind '" + kind +
                          "' (expected flat, schwarzschild, harmonic, kerr, rt_violating, "
                          "perturbed or rigid_motion)");
}

namespace detail {

inline const std::set<std::string>& task_keys(const std::string& type) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"charges", {"type", "assert"}},
      {"intrinsic", {"type", "surfaces", "axes", "assert"}},
      {"center-identity", {"type", "radii", "p", "assert"}},
      {"sobolev", {"type", "field", "k", "p", "weight", "inner", "outer", "assert"}},
      {"continuity", {"type", "profile", "eps", "assert"}},
      {"transform-check", {"type", "rotation", "shift", "assert"}},
      {"rt-check", {"type", "r_lo", "assert"}},
      {"foliation", {"type", "radii", "mass", "lmax", "cmc_tol", "p_init", "assert"}},
      {"eigen", {"type", "radii", "surface", "count", "mass", "lmax", "assert"}},
  };
  return keys.at(type);
}

inline const std::set<std::string>& assert_keys(const std::string& type) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"charges", {"mass", "momentum", "center", "angular_momentum"}},
      {"intrinsic", {"mass_equivalence", "center"}},
      {"center-identity", {"slope"}},
      {"sobolev", {"finite", "norm"}},
      {"continuity", {"status"}},
      {"transform-check", {"pass"}},
      {"rt-check", {"satisfied"}},
      {"foliation", {"center", "agrees_with_hamiltonian"}},
      {"eigen", {"lambda0_R2", "lambda1_R3_over_m"}},
  };
  return keys.at(type);
}

// {"value": x | [x, y, z], "tol": t, "relative": bool}
inline void check_expectation(const Json& j, const std::string& ptr, bool vector) {
  only_keys(j, ptr, {"value", "tol", "relative"});
  if (!j.contains("value")) fail(ptr + "/value", "required key is missing");
  if (vector)
    vec3(j, "value", ptr);
  else
    required_number(j, "value", ptr);
  if (!(required_number(j, "tol", ptr) >= 0.0)) fail(ptr + "/tol", "must be >= 0");
  boolean(j, "relative", ptr, false);
}

inline void validate_task(const Json& t, const std::string& ptr) {
  require_object(t, ptr);
  if (!t.contains("type")) fail(ptr + "/type", "required key is missing");
  const std::string type = string(t, "type", ptr, "");
  const auto& types = task_types();
  if (std::find(types.begin(), types.end(), type) == types.end())
    fail(ptr + "/type", "unknown task type '" + type + "'");
  only_keys(t, ptr, task_keys(type));
  if (t.contains("assert")) {
    const std::string ap = ptr + "/assert";
    only_keys(t.at("assert"), ap, assert_keys(type));
    for (const auto& [k, v] : t.at("assert").items()) {
      const std::string kp = ap + "/" + k;
      if (k == "momentum" || k == "center" || k == "angular_momentum")
        check_expectation(v, kp, true);
      else if (k == "mass" || k == "slope" || k == "norm" || k == "lambda0_R2" ||
               k == "lambda1_R3_over_m")
        check_expectation(v, kp, false);
      else if (k == "mass_equivalence") {
        if (!v.is_number() || v.get<double>() < 0.0) fail(kp, "expected a tolerance >= 0");
      } else if (k == "status") {
        if (!v.is_string()) fail(kp, "expected a string");
      } else if (!v.is_boolean()) {
        fail(kp, "expected true or false");
      }
    }
  }
  auto positive_list = [&](const std::string& key) {
    const auto r = numbers(t, key, ptr, {});
    for (std::size_t i = 0; i < r.size(); ++i)
      if (!(r[i] > 0.0)) fail(ptr + "/" + key + "/" + std::to_string(i), "must be positive");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) fail(ptr + "/" + key, "must be strictly ascending");
  };
  if (type == "center-identity" || type == "foliation" || type == "eigen") positive_list("radii");
  if (type == "center-identity") vec3(t, "p", ptr);
  if (type == "intrinsic") {
    const std::string s = string(t, "surfaces", ptr, "spheres");
    if (s != "spheres" && s != "ellipsoids")
      fail(ptr + "/surfaces", "expected 'spheres' or 'ellipsoids'");
    const Vec3 ax = vec3(t, "axes", ptr, {1.0, 1.0, 1.2});
    for (std::size_t i = 0; i < 3; ++i)
      if (!(ax[i] > 0.0)) fail(ptr + "/axes/" + std::to_string(i), "must be positive");
  }
  if (type == "sobolev") {
    const std::string f = string(t, "field", ptr, "metric");
    if (f != "metric" && f != "odd_metric" && f != "momentum")
      fail(ptr + "/field", "expected 'metric', 'odd_metric' or 'momentum'");
    const int k = integer(t, "k", ptr, 2);
    if (k < 0 || k > 2) fail(ptr + "/k", "Sobolev order must be 0, 1 or 2");
    if (t.contains("p") && !(t.at("p").is_string() && t.at("p").get<std::string>() == "inf")) {
      if (!(number(t, "p", ptr, 2.0) >= 1.0)) fail(ptr + "/p", "exponent must be >= 1 or \"inf\"");
    }
    number(t, "weight", ptr, 1.0);
    number(t, "inner", ptr, 1.0);
    if (t.contains("outer") && !t.at("outer").is_null()) number(t, "outer", ptr, 0.0);
  }
  if (type == "continuity") {
    try {
      profile_from_name(string(t, "profile", ptr, "mass_dipole"));
    } catch (const ConfigError& e) {
      fail(ptr + "/profile", e.what());
    }
    if (numbers(t, "eps", ptr, {1.0}).empty()) fail(ptr + "/eps", "needs at least one value");
  }
  if (type == "transform-check") {
    mat3(t, "rotation", ptr, Mat3::identity());
    vec3(t, "shift", ptr);
  }
  if (type == "rt-check" && !(number(t, "r_lo", ptr, 50.0) > 0.0))
    fail(ptr + "/r_lo", "must be positive");
  if (type == "foliation" || type == "eigen") {
    if (t.contains("lmax") && integer(t, "lmax", ptr, 0) < 4) fail(ptr + "/lmax", "must be >= 4");
    number(t, "mass", ptr, 0.0);
  }
  if (type == "foliation") {
    if (t.contains("cmc_tol") && !(number(t, "cmc_tol", ptr, 0.0) > 0.0))
      fail(ptr + "/cmc_tol", "must be positive");
    vec3(t, "p_init", ptr);
  }
  if (type == "eigen") {
    const std::string s = string(t, "surface", ptr, "cmc");
    if (s != "cmc" && s != "sphere") fail(ptr + "/surface", "expected 'cmc' or 'sphere'");
    if (integer(t, "count", ptr, 4) < 1) fail(ptr + "/count", "must be >= 1");
  }
}

inline RadiusSchedule parse_schedule(const Json& j, const std::string& ptr) {
  only_keys(j, ptr, {"radii", "start", "factor", "count"});
  if (j.contains("radii")) {
    if (j.contains("start") || j.contains("factor") || j.contains("count"))
      fail(ptr, "give either 'radii' or 'start'/'factor'/'count', not both");
    return {numbers(j, "radii", ptr, {})};
  }
  const double start = number(j, "start", ptr, 200.0);
  const double factor = number(j, "factor", ptr, 2.0);
  const int count = integer(j, "count", ptr, 5);
  if (!(start > 0.0)) fail(ptr + "/start", "must be positive");
  if (!(factor > 1.0)) fail(ptr + "/factor", "must exceed 1");
  if (count < 1) fail(ptr + "/count", "must be positive");
  return geometric_schedule(start, factor, count);
}

// Line and column of a byte offset.
inline std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Parses and validates a configuration document. Every error names the
/// offending location as a JSON pointer.
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("parse error at " + position(text, e.byte) + ": " + e.what());
  }
  only_keys(j, "", {"schema_version", "name", "family", "schedule", "lmax", "force_rt", "output",
                    "tasks"});
  if (!j.contains("schema_version")) fail("/schema_version", "required key is missing");
  RunConfig c;
  c.raw = j;
  c.schema_version = integer(j, "schema_version", "", 0);
  if (c.schema_version != kSchemaVersion)
    fail("/schema_version", "unsupported schema version " + std::to_string(c.schema_version) +
                                " (expected " + std::to_string(kSchemaVersion) + ")");
  c.name = string(j, "name", "", "run");
  if (!j.contains("family")) fail("/family", "required key is missing");
  c.family = parse_family(j.at("family"), "/family");
  c.lmax = integer(j, "lmax", "", 16);
  if (c.lmax < 0) fail("/lmax", "must be non-negative (got " + std::to_string(c.lmax) + ")");
  if (c.lmax < 4) fail("/lmax", "must be >= 4 for the flux quadrature");
  c.force_rt = boolean(j, "force_rt", "", false);
  c.output = string(j, "output", "", "out");
  c.schedule = parse_schedule(j.contains("schedule") ? j.at("schedule") : Json::object(),
                              "/schedule");
  try {
    validate_schedule(c.schedule, c.family.R0);
  } catch (const Error& e) {
    fail("/schedule", e.what());
  }
  if (!j.contains("tasks")) fail("/tasks", "required key is missing");
  if (!j.at("tasks").is_array()) fail("/tasks", "expected an array");
  for (std::size_t i = 0; i < j.at("tasks").size(); ++i) {
    const std::string ptr = "/tasks/" + std::to_string(i);
    const Json& t = j.at("tasks")[i];
    validate_task(t, ptr);
    c.tasks.push_back({t.at("type").get<std::string>(), t, ptr});
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Family kinds with their parameters, for `list-families`.
inline std::vector<std::pair<std::string, std::string>> family_catalog() {
  return {
      {"flat", "Euclidean data (m = 0)"},
      {"schwarzschild", "mass, center[3], q, R0; isotropic time-symmetric slice"},
      {"harmonic", "monopole A (m = 2A), dipole B (C = B/A), quadrupole[3][3], shift_monopole, "
                   "shift_dipole[3][3], q, R0"},
      {"kerr", "mass, spin, R0; Boyer-Lindquist slice, metric only"},
      {"rt_violating", "q, amp, dir[3], mass, R0; odd |x|^-q term"},
      {"perturbed", "base{...}, eps, profile (quadrupole, anisotropic, mass_dipole, odd_power), "
                    "q, R0"},
      {"rigid_motion", "base{...}, rotation[3][3], shift[3]; pullback to y = O x + a"},
  };
}

}  // namespace asymflat::cli
