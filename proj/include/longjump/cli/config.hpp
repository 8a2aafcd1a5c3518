#pragma once

#include <json.hpp>

#include <algorithm>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "longjump/geometry/system.hpp"
#include "longjump/group/group.hpp"
#include "longjump/group/subgroup.hpp"
#include "longjump/kernel/kernel.hpp"
#include "longjump/util/checked.hpp"

namespace longjump {

using ordered_json = nlohmann::ordered_json;

// Configuration problems carry the JSON pointer of the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfgdetail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config error at " + path + ": " + msg);
}

inline void require_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

inline void check_keys(const ordered_json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "/" + it.key(), "unknown key");
  }
}

inline const ordered_json* find(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double get_number(const ordered_json& j, const std::string& path,
                         const char* key, std::optional<double> dflt) {
  const ordered_json* v = find(j, key);
  if (v == nullptr) {
    if (dflt) return *dflt;
    fail(path + "/" + key, "missing required number");
  }
  if (!v->is_number()) fail(path + "/" + key, "expected a number");
  return v->get<double>();
}

inline i64 get_integer(const ordered_json& j, const std::string& path,
                       const char* key, std::optional<i64> dflt) {
  const ordered_json* v = find(j, key);
  if (v == nullptr) {
    if (dflt) return *dflt;
    fail(path + "/" + key, "missing required integer");
  }
  if (!v->is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v->get<i64>();
}

inline std::string get_string(const ordered_json& j, const std::string& path,
                              const char* key,
                              std::optional<std::string> dflt) {
  const ordered_json* v = find(j, key);
  if (v == nullptr) {
    if (dflt) return *dflt;
    fail(path + "/" + key, "missing required string");
  }
  if (!v->is_string()) fail(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

}  // namespace cfgdetail

// Parsed experiment description: the walk specification plus run settings.
struct ExperimentConfig {
  Group group = Group::zk(1);
  WalkSpec spec{Group::zk(1)};
  std::vector<std::pair<int, std::string>> subgroupSpecs;  // (id, preset)
  std::string nilpotentApprox;  // "" = automatic
  double wStar = 0.25;
  std::string experiment;
  TruncationPolicy policy;
  u64 seed = 1;
  std::string outputDir = "out";
  ordered_json params = ordered_json::object();
};

inline const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> v = {
      "return-exponent", "geometry-audit", "near-diagonal", "control",
      "exit",            "holder",         "spectral",      "poincare"};
  return v;
}

inline ExperimentConfig parse_config(const std::string& text) {
  using cfgdetail::check_keys;
  using cfgdetail::fail;
  using cfgdetail::find;
  using cfgdetail::get_integer;
  using cfgdetail::get_number;
  using cfgdetail::get_string;

  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error at /: not valid JSON (") +
                      e.what() + ")");
  }
  check_keys(j, "", {"group", "subgroups", "nilpotentApprox", "measure",
                     "wStar", "experiment", "policy", "seed", "outputDir",
                     "params"});

  // ---- group ----
  const ordered_json* gj = find(j, "group");
  if (gj == nullptr) fail("/group", "missing required object");
  check_keys(*gj, "/group", {"kind", "k"});
  std::string kind = get_string(*gj, "/group", "kind", std::nullopt);
  Group group = Group::zk(1);
  if (kind == "zk") {
    i64 k = get_integer(*gj, "/group", "k", std::nullopt);
    if (k < 1 || k > 8) fail("/group/k", "rank must be between 1 and 8");
    group = Group::zk(static_cast<int>(k));
  } else {
    if (find(*gj, "k") != nullptr)
      fail("/group/k", "only the lattice family takes a rank");
    if (kind == "heisenberg")
      group = Group::heisenberg3();
    else if (kind == "dihedral")
      group = Group::dihedral_inf();
    else if (kind == "delta")
      group = Group::delta();
    else if (kind == "semidirect")
      group = Group::semidirect_zrot();
    else
      fail("/group/kind",
           "unknown kind (use zk, heisenberg, dihedral, delta, semidirect)");
  }

  ExperimentConfig cfg;
  cfg.group = group;
  cfg.spec = WalkSpec(group);

  // ---- subgroups ----
  const ordered_json* sj = find(j, "subgroups");
  if (sj == nullptr || !sj->is_array() || sj->empty())
    fail("/subgroups", "expected a non-empty array");
  std::map<int, Subgroup> byId;
  for (std::size_t i = 0; i < sj->size(); ++i) {
    std::string path = "/subgroups/" + std::to_string(i);
    const ordered_json& e = (*sj)[i];
    check_keys(e, path, {"id", "preset"});
    i64 id = get_integer(e, path, "id", std::nullopt);
    std::string preset = get_string(e, path, "preset", std::nullopt);
    if (id < 1 || id > 1000000) fail(path + "/id", "id out of range");
    if (byId.count(static_cast<int>(id))) fail(path + "/id", "duplicate id");
    try {
      byId.emplace(static_cast<int>(id),
                   Subgroup(group, preset, static_cast<int>(id)));
    } catch (const std::exception& e2) {
      fail(path + "/preset", e2.what());
    }
    cfg.subgroupSpecs.emplace_back(static_cast<int>(id), preset);
  }

  // ---- nilpotentApprox (optional tag; construction is automatic) ----
  if (find(j, "nilpotentApprox") != nullptr) {
    cfg.nilpotentApprox =
        get_string(j, "", "nilpotentApprox", std::nullopt);
    if (cfg.nilpotentApprox != "self" && cfg.nilpotentApprox != "lattice")
      fail("/nilpotentApprox", "expected \"self\" or \"lattice\"");
    bool selfApprox = group.kind() == GroupKind::ZK ||
                      group.kind() == GroupKind::Heisenberg3;
    if (selfApprox != (cfg.nilpotentApprox == "self"))
      fail("/nilpotentApprox", "tag does not match the group");
  }

  // ---- measure ----
  const ordered_json* mj = find(j, "measure");
  if (mj == nullptr) fail("/measure", "missing required object");
  check_keys(*mj, "/measure", {"p0", "components", "mu0", "shellCap"});
  cfg.spec.p0 = get_number(*mj, "/measure", "p0", 0.0);
  i64 shellCap = get_integer(*mj, "/measure", "shellCap", i64{1} << 20);
  cfg.spec.shellCap = shellCap;
  const ordered_json* comps = find(*mj, "components");
  if (comps == nullptr || !comps->is_array())
    fail("/measure/components", "expected an array");
  for (std::size_t i = 0; i < comps->size(); ++i) {
    std::string path = "/measure/components/" + std::to_string(i);
    const ordered_json& e = (*comps)[i];
    check_keys(e, path, {"subgroup", "p", "phi", "eMass"});
    i64 sid = get_integer(e, path, "subgroup", std::nullopt);
    auto it = byId.find(static_cast<int>(sid));
    if (it == byId.end()) fail(path + "/subgroup", "no subgroup with this id");
    double p = get_number(e, path, "p", std::nullopt);
    double eMass = get_number(e, path, "eMass", -1.0);
    const ordered_json* pj = find(e, "phi");
    if (pj == nullptr) fail(path + "/phi", "missing required object");
    check_keys(*pj, path + "/phi", {"family", "alpha", "beta"});
    std::string family = get_string(*pj, path + "/phi", "family", std::nullopt);
    JumpProfile prof = JumpProfile::power(1.0);
    if (family == "power") {
      if (find(*pj, "beta") != nullptr)
        fail(path + "/phi/beta", "plain power profiles take no log power");
      prof = JumpProfile::power(get_number(*pj, path + "/phi", "alpha",
                                           std::nullopt));
    } else if (family == "power-log") {
      prof = JumpProfile::power_log(
          get_number(*pj, path + "/phi", "alpha", std::nullopt),
          get_number(*pj, path + "/phi", "beta", std::nullopt));
    } else if (family == "linear-sqrt-cap") {
      if (find(*pj, "alpha") != nullptr || find(*pj, "beta") != nullptr)
        fail(path + "/phi", "capped square-root profile takes no parameters");
      prof = JumpProfile::linear_sqrt_cap();
    } else {
      fail(path + "/phi/family",
           "unknown family (use power, power-log, linear-sqrt-cap)");
    }
    cfg.spec.components.emplace_back(it->second, prof, p, eMass);
  }
  const ordered_json* m0 = find(*mj, "mu0");
  if (m0 != nullptr) {
    if (!m0->is_array()) fail("/measure/mu0", "expected an array");
    for (std::size_t i = 0; i < m0->size(); ++i) {
      std::string path = "/measure/mu0/" + std::to_string(i);
      const ordered_json& e = (*m0)[i];
      check_keys(e, path, {"element", "mass"});
      const ordered_json* ej = find(e, "element");
      if (ej == nullptr || !ej->is_array())
        fail(path + "/element", "expected a coordinate array");
      if (static_cast<int>(ej->size()) != group.coords())
        fail(path + "/element", "wrong number of coordinates");
      Element g;
      g.n = static_cast<std::uint8_t>(ej->size());
      for (std::size_t c = 0; c < ej->size(); ++c) {
        if (!(*ej)[c].is_number_integer())
          fail(path + "/element", "coordinates must be integers");
        g[static_cast<int>(c)] = (*ej)[c].get<i64>();
      }
      double mass = get_number(e, path, "mass", std::nullopt);
      cfg.spec.mu0.push_back(Mu0Atom{g, mass});
    }
  }

  // ---- run settings ----
  cfg.wStar = get_number(j, "", "wStar", 0.25);
  if (!(cfg.wStar > 0.0)) fail("/wStar", "must be positive");
  cfg.spec.wStarOverride = cfg.wStar;

  cfg.experiment = get_string(j, "", "experiment", std::nullopt);
  const auto& known = known_experiments();
  if (std::find(known.begin(), known.end(), cfg.experiment) == known.end())
    fail("/experiment", "unknown experiment tag");

  bool oneDim = (group.kind() == GroupKind::ZK && group.coords() == 1) ||
                group.kind() == GroupKind::DihedralInf;
  cfg.policy.epsPerStep = oneDim ? 1e-14 : 1e-12;
  const ordered_json* pj = find(j, "policy");
  if (pj != nullptr) {
    check_keys(*pj, "/policy", {"mode", "epsPerStep", "maxSupport"});
    std::string mode = get_string(*pj, "/policy", "mode", "threshold");
    if (mode == "threshold")
      cfg.policy.mode = TruncationPolicy::Mode::Threshold;
    else if (mode == "top-k")
      cfg.policy.mode = TruncationPolicy::Mode::TopK;
    else
      fail("/policy/mode", "expected \"threshold\" or \"top-k\"");
    cfg.policy.epsPerStep =
        get_number(*pj, "/policy", "epsPerStep", cfg.policy.epsPerStep);
    if (cfg.policy.epsPerStep < 0.0) fail("/policy/epsPerStep", "negative");
    cfg.policy.maxSupport =
        get_integer(*pj, "/policy", "maxSupport", cfg.policy.maxSupport);
    if (cfg.policy.maxSupport < 1) fail("/policy/maxSupport", "too small");
  }

  i64 seed = get_integer(j, "", "seed", 1);
  if (seed < 0) fail("/seed", "must be non-negative");
  cfg.seed = static_cast<u64>(seed);
  cfg.outputDir = get_string(j, "", "outputDir", "out");

  const ordered_json* par = find(j, "params");
  if (par != nullptr) {
    cfgdetail::require_object(*par, "/params");
    cfg.params = *par;
  }

  // full semantic validation of the walk specification
  try {
    cfg.spec.validate();
  } catch (const std::exception& e) {
    fail("/measure", e.what());
  }
  return cfg;
}

// Canonical serialization: fixed key order, values as parsed.  Parsing the
// output and serializing again reproduces it byte for byte.
inline std::string canonical_config_text(const ExperimentConfig& cfg) {
  ordered_json j;
  ordered_json gj;
  switch (cfg.group.kind()) {
    case GroupKind::ZK:
      gj["kind"] = "zk";
      gj["k"] = cfg.group.coords();
      break;
    case GroupKind::Heisenberg3:
      gj["kind"] = "heisenberg";
      break;
    case GroupKind::DihedralInf:
      gj["kind"] = "dihedral";
      break;
    case GroupKind::DeltaGroup:
      gj["kind"] = "delta";
      break;
    case GroupKind::SemidirectZRotZ2:
      gj["kind"] = "semidirect";
      break;
  }
  j["group"] = gj;

  ordered_json subs = ordered_json::array();
  auto specs = cfg.subgroupSpecs;
  std::sort(specs.begin(), specs.end());
  for (const auto& [id, preset] : specs)
    subs.push_back({{"id", id}, {"preset", preset}});
  j["subgroups"] = subs;
  if (!cfg.nilpotentApprox.empty()) j["nilpotentApprox"] = cfg.nilpotentApprox;

  ordered_json meas;
  meas["p0"] = cfg.spec.p0;
  ordered_json comps = ordered_json::array();
  for (const auto& c : cfg.spec.components) {
    ordered_json e;
    e["subgroup"] = c.subgroup.id();
    e["p"] = c.p;
    ordered_json phi;
    switch (c.profile.family) {
      case JumpProfile::Family::Power:
        phi["family"] = "power";
        phi["alpha"] = c.profile.alpha;
        break;
      case JumpProfile::Family::PowerLog:
        phi["family"] = "power-log";
        phi["alpha"] = c.profile.alpha;
        phi["beta"] = c.profile.beta;
        break;
      case JumpProfile::Family::LinearSqrtCap:
        phi["family"] = "linear-sqrt-cap";
        break;
    }
    e["phi"] = phi;
    if (c.eMass >= 0.0) e["eMass"] = c.eMass;
    comps.push_back(e);
  }
  meas["components"] = comps;
  if (!cfg.spec.mu0.empty()) {
    auto atoms = cfg.spec.mu0;
    std::sort(atoms.begin(), atoms.end(),
              [](const Mu0Atom& a, const Mu0Atom& b) { return a.g < b.g; });
    ordered_json arr = ordered_json::array();
    for (const auto& a : atoms) {
      ordered_json e;
      ordered_json coords = ordered_json::array();
      for (int c = 0; c < a.g.n; ++c) coords.push_back(a.g[c]);
      e["element"] = coords;
      e["mass"] = a.mass;
      arr.push_back(e);
    }
    meas["mu0"] = arr;
  }
  meas["shellCap"] = cfg.spec.shellCap;
  j["measure"] = meas;

  j["wStar"] = cfg.wStar;
  j["experiment"] = cfg.experiment;
  ordered_json pol;
  pol["mode"] = cfg.policy.mode == TruncationPolicy::Mode::TopK ? "top-k"
                                                                : "threshold";
  pol["epsPerStep"] = cfg.policy.epsPerStep;
  pol["maxSupport"] = cfg.policy.maxSupport;
  j["policy"] = pol;
  j["seed"] = cfg.seed;
  j["outputDir"] = cfg.outputDir;
  if (!cfg.params.empty()) j["params"] = cfg.params;
  return j.dump(2) + "\n";
}

}  // namespace longjump
