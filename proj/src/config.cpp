#include "contagion/config.hpp"

#include <fstream>

namespace contagion {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

const json* opt_member(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Mat matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const int d = static_cast<int>(j.size());
  Mat m(d);
  for (int r = 0; r < d; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const std::vector<double> row = number_list(j[static_cast<std::size_t>(r)], rp);
    if (static_cast<int>(row.size()) != d) fail(rp, "matrix must be square");
    for (int c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

ScalarGenerator generator(const json& j, const std::string& path) {
  const std::string kind = text(member(j, path, "kind"), path + ".kind");
  try {
    if (kind == "constant")
      return ScalarGenerator::constant(number(member(j, path, "value"), path + ".value"));
    if (kind == "iid")
      return ScalarGenerator::iid(number_list(member(j, path, "values"), path + ".values"),
                                  number_list(member(j, path, "probs"), path + ".probs"));
    if (kind == "periodic")
      return ScalarGenerator::periodic(number_list(member(j, path, "cycle"), path + ".cycle"));
    if (kind == "two_state_markov")
      return ScalarGenerator::two_state_markov(
          number(member(j, path, "p01"), path + ".p01"),
          number(member(j, path, "p10"), path + ".p10"),
          number(member(j, path, "emit0"), path + ".emit0"),
          number(member(j, path, "emit1"), path + ".emit1"));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown generator kind '" + kind + "'");
}

DisplacementLaw law(const json& j, const std::string& path, int d) {
  const std::string kind = text(member(j, path, "kind"), path + ".kind");
  DisplacementLaw out = DisplacementLaw::point_mass1(0.0);
  try {
    if (kind == "point_mass")
      out = DisplacementLaw::point_mass(number_list(member(j, path, "c"), path + ".c"));
    else if (kind == "finite_discrete") {
      const json& sup = member(j, path, "support");
      if (!sup.is_array()) fail(path + ".support", "expected an array of points");
      std::vector<Vec> support;
      for (std::size_t i = 0; i < sup.size(); ++i)
        support.push_back(number_list(sup[i], path + ".support[" + std::to_string(i) + "]"));
      out = DisplacementLaw::finite_discrete(
          std::move(support), number_list(member(j, path, "probs"), path + ".probs"));
    } else if (kind == "gaussian")
      out = DisplacementLaw::gaussian(number_list(member(j, path, "mean"), path + ".mean"),
                                      matrix(member(j, path, "cov"), path + ".cov"));
    else if (kind == "uniform_box")
      out = DisplacementLaw::uniform_box(number_list(member(j, path, "lo"), path + ".lo"),
                                         number_list(member(j, path, "hi"), path + ".hi"));
    else if (kind == "rademacher")
      out = DisplacementLaw::rademacher();
    else
      fail(path + ".kind", "unknown displacement kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  if (out.dim() != d)
    fail(path, "displacement dimension " + std::to_string(out.dim()) +
                   " does not match config dimension " + std::to_string(d));
  return out;
}

DisplacementSpec displacement(const json& j, const std::string& path, int d) {
  DisplacementSpec spec{law(member(j, path, "law"), path + ".law", d),
                        JointDisplacement::Coupling::independent};
  if (const json* c = opt_member(j, "coupling")) {
    const std::string s = text(*c, path + ".coupling");
    if (s == "independent")
      spec.coupling = JointDisplacement::Coupling::independent;
    else if (s == "common_copy")
      spec.coupling = JointDisplacement::Coupling::common_copy;
    else
      fail(path + ".coupling", "unknown coupling '" + s + "'");
  }
  return spec;
}

OffspringSpec offspring(const json& j, const std::string& path) {
  OffspringSpec out;
  if (const json* o = opt_member(j, "offspring")) {
    if (!o->is_array() || o->empty()) fail(path + ".offspring", "expected a nonempty array");
    out.cycle.clear();
    for (std::size_t i = 0; i < o->size(); ++i) {
      const std::int64_t k =
          integer((*o)[i], path + ".offspring[" + std::to_string(i) + "]");
      if (k < 0) fail(path + ".offspring[" + std::to_string(i) + "]", "must be >= 0");
      out.cycle.push_back(static_cast<int>(k));
    }
  }
  return out;
}

ResourceSpec resource(const json& j, const std::string& path) {
  const json* r = opt_member(j, "resource");
  if (!r) return ResourceSpec::constant(1.0);
  const std::string kind = text(member(*r, path + ".resource", "kind"), path + ".resource.kind");
  if (kind == "constant") {
    const double v = number(member(*r, path + ".resource", "value"), path + ".resource.value");
    if (v < 0.0) fail(path + ".resource.value", "must be >= 0");
    return ResourceSpec::constant(v);
  }
  if (kind == "match_weight") return ResourceSpec::match_weight();
  fail(path + ".resource.kind", "unknown resource kind '" + kind + "'");
}

WeightRegime regime(const json& j, const std::string& path) {
  const std::string kind = text(member(j, path, "kind"), path + ".kind");
  try {
    if (kind == "power_law") {
      SlowlyVarying L = SlowlyVarying::one();
      if (const json* sv = opt_member(j, "slowly_varying"))
        L = SlowlyVarying::log_pow(
            number(member(*sv, path + ".slowly_varying", "beta"), path + ".slowly_varying.beta"));
      return WeightRegime::power_law(generator(member(j, path, "xi"), path + ".xi"),
                                     number(member(j, path, "alpha"), path + ".alpha"), L,
                                     offspring(j, path), resource(j, path));
    }
    if (kind == "exponential")
      return WeightRegime::exponential(generator(member(j, path, "xi"), path + ".xi"),
                                       generator(member(j, path, "tau"), path + ".tau"),
                                       offspring(j, path), resource(j, path));
    if (kind == "explicit") {
      const json& sj = member(j, path, "steps");
      if (!sj.is_array() || sj.empty()) fail(path + ".steps", "expected a nonempty array");
      std::vector<ExplicitStepSpec> steps;
      for (std::size_t i = 0; i < sj.size(); ++i) {
        const std::string sp = path + ".steps[" + std::to_string(i) + "]";
        ExplicitStepSpec s;
        s.k = static_cast<int>(integer(member(sj[i], sp, "k"), sp + ".k"));
        s.w = number_list(member(sj[i], sp, "w"), sp + ".w");
        s.u = number_list(member(sj[i], sp, "u"), sp + ".u");
        steps.push_back(std::move(s));
      }
      return WeightRegime::explicit_steps(std::move(steps));
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown regime kind '" + kind + "'");
}

}  // namespace

const WeightRegime& ExperimentConfig::require_regime() const {
  if (!regime) throw ConfigError("regime: missing");
  return *regime;
}

const DisplacementSpec& ExperimentConfig::require_displacement() const {
  if (!displacement) throw ConfigError("displacement: missing");
  return *displacement;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.raw = j;

  cfg.dimension = static_cast<int>(integer(member(j, "config", "dimension"), "dimension"));
  if (cfg.dimension < 1 || cfg.dimension > 16) fail("dimension", "must lie in [1, 16]");

  const json& init = member(j, "config", "initial");
  if (!init.is_array() || init.empty()) fail("initial", "expected a nonempty array");
  for (std::size_t i = 0; i < init.size(); ++i) {
    const std::string ip = "initial[" + std::to_string(i) + "]";
    InitPoint p;
    p.x = number_list(member(init[i], ip, "x"), ip + ".x");
    if (static_cast<int>(p.x.size()) != cfg.dimension)
      fail(ip + ".x", "length must equal dimension");
    if (const json* w = opt_member(init[i], "w")) p.w = number(*w, ip + ".w");
    if (const json* u = opt_member(init[i], "u")) p.u = number(*u, ip + ".u");
    if (p.w < 0.0) fail(ip + ".w", "must be >= 0");
    if (p.u < 0.0) fail(ip + ".u", "must be >= 0");
    cfg.initial.push_back(std::move(p));
  }

  if (const json* r = opt_member(j, "regime")) cfg.regime = regime(*r, "regime");
  if (const json* d = opt_member(j, "displacement"))
    cfg.displacement = displacement(*d, "displacement", cfg.dimension);

  cfg.steps = integer(member(j, "config", "steps"), "steps");
  if (cfg.steps < 0) fail("steps", "must be >= 0");
  if (const json* r = opt_member(j, "replicates")) {
    cfg.replicates = integer(*r, "replicates");
    if (cfg.replicates < 1) fail("replicates", "must be >= 1");
  }
  if (const json* s = opt_member(j, "seed")) {
    if (!s->is_number_integer()) fail("seed", "expected an integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  if (const json* t = opt_member(j, "theorem")) {
    cfg.theorem = static_cast<int>(integer(*t, "theorem"));
    if (cfg.theorem < 1 || cfg.theorem > 3) fail("theorem", "must be 1, 2 or 3");
  }
  if (const json* o = opt_member(j, "options")) {
    if (!o->is_object()) fail("options", "expected an object");
    cfg.options = *o;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace contagion
