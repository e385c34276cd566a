#include "col/harness/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace col::harness {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail("unknown key '" + where + (where.empty() ? "" : ".") + k + "'");
  }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("missing key '" + where + "." + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail("wrong type for '" + where + "." + key + "'");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T def, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return def;
  return get<T>(j, key, where);
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(what + " must be an array of numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(vector_to_json(m.row(r).transpose()));
  return a;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Vector first = vector_from_json(j[0], what);
  Matrix m(rows, first.size());
  for (Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], what);
    if (row.size() != m.cols()) fail(what + " has ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

DecisionSet set_from_json(const Json& j) {
  if (!j.is_object()) fail("set must be an object");
  const std::string type = get<std::string>(j, "type", "set");
  try {
    if (type == "box") {
      only_keys(j, "set", {"type", "lower", "upper"});
      return DecisionSet::box(vector_from_json(j.at("lower"), "set.lower"),
                              vector_from_json(j.at("upper"), "set.upper"));
    }
    if (type == "cube") {
      only_keys(j, "set", {"type", "dim", "lo", "hi"});
      return DecisionSet::cube(get<long>(j, "dim", "set"), get<double>(j, "lo", "set"),
                               get<double>(j, "hi", "set"));
    }
    if (type == "ball") {
      only_keys(j, "set", {"type", "center", "radius"});
      return DecisionSet::ball(vector_from_json(j.at("center"), "set.center"),
                               get<double>(j, "radius", "set"));
    }
    if (type == "simplex") {
      only_keys(j, "set", {"type", "dim"});
      return DecisionSet::simplex(get<long>(j, "dim", "set"));
    }
    if (type == "product") {
      only_keys(j, "set", {"type", "factors"});
      std::vector<DecisionSet> fs;
      for (const auto& f : j.at("factors")) fs.push_back(set_from_json(f));
      return DecisionSet::product(std::move(fs));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    fail(std::string("set: ") + e.what());
  } catch (const Error& e) {
    fail(std::string("set: ") + e.what());
  }
  fail("unknown set type '" + type + "' (expected box|cube|ball|simplex|product)");
}

Json set_to_json(const DecisionSet& s) {
  using S = DecisionSet;
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, S::Box>) {
          return {{"type", "box"}, {"lower", vector_to_json(v.lower)}, {"upper", vector_to_json(v.upper)}};
        } else if constexpr (std::is_same_v<T, S::Ball>) {
          return {{"type", "ball"}, {"center", vector_to_json(v.center)}, {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, S::Simplex>) {
          return {{"type", "simplex"}, {"dim", v.dim}};
        } else {
          Json fs = Json::array();
          for (const auto& f : v.factors) fs.push_back(set_to_json(f));
          return {{"type", "product"}, {"factors", fs}};
        }
      },
      s.variant());
}

namespace {

StepConfig step_from_json(const Json& j, const std::string& where) {
  only_keys(j, where, {"type", "eta"});
  StepConfig s;
  s.type = get<std::string>(j, "type", where);
  static const std::set<std::string> kinds{"constant", "inverse_sqrt", "md_optimal", "md_optimal_sqrt", "predictable"};
  if (!kinds.count(s.type)) {
    fail(where + ".type must be constant|inverse_sqrt|md_optimal|md_optimal_sqrt|predictable");
  }
  s.eta = get_or<double>(j, "eta", s.type == "inverse_sqrt" ? 1.0 : 0.1, where);
  return s;
}

AlgorithmConfig algorithm_from_json(const Json& j, const std::string& where) {
  only_keys(j, where, {"kind", "label", "step", "geometry", "trap_lambda"});
  AlgorithmConfig a;
  try {
    a.kind = parse_algorithm(get<std::string>(j, "kind", where));
    a.geometry = BregmanGeometry::parse(get_or<std::string>(j, "geometry", "euclidean", where));
  } catch (const InvalidArgument& e) {
    fail(where + ": " + e.what());
  }
  a.label = get_or<std::string>(j, "label", algorithm_name(a.kind), where);
  if (j.contains("step")) {
    a.step = step_from_json(j.at("step"), where + ".step");
  } else if (a.kind == AlgorithmKind::kMann) {
    a.step = {"constant", 0.5};
  }
  if (j.contains("trap_lambda") && !j.at("trap_lambda").is_null()) {
    if (j.at("trap_lambda").is_string() && j.at("trap_lambda") == "auto") {
      a.trap_lambda.reset();
    } else {
      a.trap_lambda = get<double>(j, "trap_lambda", where);
    }
  }
  return a;
}

FeedbackSpec feedback_from_json(const Json& j) {
  only_keys(j, "feedback", {"mode", "sigma", "noise", "adversary"});
  FeedbackSpec f;
  try {
    f.mode = FeedbackSpec::parse_mode(get_or<std::string>(j, "mode", "deterministic", "feedback"));
    f.sigma = get_or<double>(j, "sigma", 0.0, "feedback");
    const std::string noise = get_or<std::string>(j, "noise", "gaussian", "feedback");
    if (noise == "gaussian") {
      f.noise = FeedbackSpec::Noise::kGaussian;
    } else if (noise == "problem") {
      f.noise = FeedbackSpec::Noise::kProblem;
    } else {
      fail("feedback.noise must be gaussian|problem");
    }
    if (j.contains("adversary")) {
      const Json& a = j.at("adversary");
      only_keys(a, "feedback.adversary", {"schedule", "kappa", "direction"});
      f.adversary.schedule =
          AdversarySpec::parse_schedule(get_or<std::string>(a, "schedule", "zero", "feedback.adversary"));
      f.adversary.kappa = get_or<double>(a, "kappa", 0.0, "feedback.adversary");
      if (a.contains("direction") && !a.at("direction").is_null()) {
        f.adversary.direction = vector_from_json(a.at("direction"), "feedback.adversary.direction");
      }
    }
  } catch (const InvalidArgument& e) {
    fail(std::string("feedback: ") + e.what());
  }
  if (f.has_noise() && !(f.sigma >= 0.0)) fail("feedback.sigma must be >= 0");
  return f;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  only_keys(j, "", {"version", "name", "problem", "algorithms", "feedback", "horizon", "seeds",
                    "master_seed", "initial_point", "drift", "oracle", "output_dir", "workers"});
  ExperimentConfig c;
  c.version = get<int>(j, "version", "");
  if (c.version != kConfigVersion) {
    fail("unsupported version " + std::to_string(c.version) + " (expected " +
         std::to_string(kConfigVersion) + ")");
  }
  c.name = get_or<std::string>(j, "name", c.name, "");

  const Json& p = j.contains("problem") ? j.at("problem") : Json();
  if (!p.is_object()) fail("missing object 'problem'");
  only_keys(p, "problem", {"family", "params"});
  c.problem.family = get<std::string>(p, "family", "problem");
  c.problem.params = p.contains("params") ? p.at("params") : Json::object();
  if (!c.problem.params.is_object()) fail("problem.params must be an object");

  if (!j.contains("algorithms") || !j.at("algorithms").is_array() || j.at("algorithms").empty()) {
    fail("'algorithms' must be a nonempty array");
  }
  for (std::size_t i = 0; i < j.at("algorithms").size(); ++i) {
    c.algorithms.push_back(
        algorithm_from_json(j.at("algorithms")[i], "algorithms[" + std::to_string(i) + "]"));
  }
  std::set<std::string> labels;
  for (const auto& a : c.algorithms) {
    if (!labels.insert(a.label).second) fail("duplicate algorithm label '" + a.label + "'");
  }

  if (j.contains("feedback")) c.feedback = feedback_from_json(j.at("feedback"));
  c.horizon = get<long>(j, "horizon", "");
  if (c.horizon < 1) fail("horizon must be >= 1");
  c.seeds = get<std::vector<std::uint64_t>>(j, "seeds", "");
  if (c.seeds.empty()) fail("'seeds' must list at least one seed");
  std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
  if (uniq.size() != c.seeds.size()) fail("'seeds' contains duplicates");
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", 0, "");
  if (j.contains("initial_point") && !j.at("initial_point").is_null()) {
    c.initial_point = vector_from_json(j.at("initial_point"), "initial_point");
  }
  if (j.contains("drift") && !j.at("drift").is_null()) {
    const Json& d = j.at("drift");
    only_keys(d, "drift", {"schedule", "scale", "seed"});
    DriftConfig dc;
    try {
      dc.schedule.kind = DriftSchedule::parse(get<std::string>(d, "schedule", "drift"));
    } catch (const InvalidArgument& e) {
      fail(std::string("drift: ") + e.what());
    }
    dc.schedule.scale = get_or<double>(d, "scale", 1.0, "drift");
    if (!(dc.schedule.scale >= 0.0)) fail("drift.scale must be >= 0");
    dc.seed = get_or<std::uint64_t>(d, "seed", 0, "drift");
    c.drift = dc;
  }
  if (j.contains("oracle")) {
    const Json& o = j.at("oracle");
    only_keys(o, "oracle", {"tol", "grid_points_per_dim"});
    c.oracle.tol = get_or<double>(o, "tol", c.oracle.tol, "oracle");
    c.oracle.grid_points_per_dim = get_or<long>(o, "grid_points_per_dim", 41, "oracle");
    if (!(c.oracle.tol > 0.0)) fail("oracle.tol must be > 0");
    if (c.oracle.grid_points_per_dim < 2) fail("oracle.grid_points_per_dim must be >= 2");
  }
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir, "");
  c.workers = get_or<int>(j, "workers", 0, "");
  if (c.workers < 0) fail("workers must be >= 0");
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["version"] = c.version;
  j["name"] = c.name;
  j["problem"] = {{"family", c.problem.family}, {"params", c.problem.params}};
  Json algs = Json::array();
  for (const auto& a : c.algorithms) {
    Json aj = {{"kind", algorithm_name(a.kind)},
               {"label", a.label},
               {"step", {{"type", a.step.type}, {"eta", a.step.eta}}},
               {"geometry", a.geometry.name()}};
    aj["trap_lambda"] = a.trap_lambda ? Json(*a.trap_lambda) : Json("auto");
    algs.push_back(aj);
  }
  j["algorithms"] = algs;
  Json fb = {{"mode", FeedbackSpec::mode_name(c.feedback.mode)},
             {"sigma", c.feedback.sigma},
             {"noise", c.feedback.noise == FeedbackSpec::Noise::kGaussian ? "gaussian" : "problem"}};
  fb["adversary"] = {{"schedule", AdversarySpec::schedule_name(c.feedback.adversary.schedule)},
                     {"kappa", c.feedback.adversary.kappa},
                     {"direction", c.feedback.adversary.direction.size()
                                       ? vector_to_json(c.feedback.adversary.direction)
                                       : Json(nullptr)}};
  j["feedback"] = fb;
  j["horizon"] = c.horizon;
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["initial_point"] = c.initial_point ? vector_to_json(*c.initial_point) : Json(nullptr);
  if (c.drift) {
    j["drift"] = {{"schedule", DriftSchedule::name(c.drift->schedule.kind)},
                  {"scale", c.drift->schedule.scale},
                  {"seed", c.drift->seed}};
  } else {
    j["drift"] = nullptr;
  }
  j["oracle"] = {{"tol", c.oracle.tol}, {"grid_points_per_dim", c.oracle.grid_points_per_dim}};
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << config_to_json(c).dump(2) << '\n';
}

void apply_seed_override(ExperimentConfig& c) {
  const char* env = std::getenv("COL_SEED");
  if (!env || !*env) return;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    c.master_seed = v;
  } catch (const std::exception&) {
    throw ConfigError("COL_SEED must be a nonnegative integer, got '" + std::string(env) + "'");
  }
}

void set_dotted(Json& tree, const std::string& key, const std::string& value) {
  Json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("grid key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      Json v;
      try {
        v = Json::parse(value);
      } catch (const Json::parse_error&) {
        v = value;
      }
      (*node)[part] = v;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace col::harness
