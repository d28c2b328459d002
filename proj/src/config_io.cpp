#include "swarmloc/config_io.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

namespace swarmloc {
namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }
  ~Section() = default;

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}: wrong type", field(key)));
    }
  }

  void read_vec(const char* key, Vec3& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& a = j_.at(key);
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number())
      throw ConfigError(fmt::format("{}: expected [x, y, z]", field(key)));
    out = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
  }

  template <class E>
  void read_enum(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    std::string s;
    bool present = j_.contains(key);
    read(key, s);
    if (!present) return;
    for (const auto& [name, value] : names)
      if (s == name) {
        out = value;
        return;
      }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += std::string(allowed.empty() ? "" : ", ") + name;
    throw ConfigError(fmt::format("{}: unknown value \"{}\" (expected one of: {})", field(key), s, allowed));
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section sub(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), field(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) throw ConfigError(fmt::format("{}: unknown field", field(k)));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* layout_name(Layout l) { return l == Layout::kMap ? "map" : "escort"; }
const char* placement_name(Placement p) { return p == Placement::kUniform ? "uniform" : "stationary"; }

const char* solver_name(Solver s) {
  switch (s) {
    case Solver::kMagd:
      return "magd";
    case Solver::kGd:
      return "gd";
    case Solver::kLs:
      return "ls";
    case Solver::kL1Admm:
      return "l1_admm";
  }
  return "magd";
}

}  // namespace

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["layout"] = layout_name(c.layout);
  j["placement"] = placement_name(c.placement);
  j["map_size"] = vec_json(c.map_size);
  j["escort_half_extent"] = vec_json(c.escort_half_extent);
  j["fleet"] = {{"anchors", c.n_anchors}, {"targets", c.n_targets}};
  j["mobility"] = {{"speed_min", c.speed_min},
                   {"speed_max", c.speed_max},
                   {"speed_redraw_period", c.speed_redraw_period},
                   {"stop_radius", c.stop_radius}};
  j["position_noise"] = {
      {"lo", c.position_noise.lo},
      {"hi", c.position_noise.hi},
      {"bounds", c.position_noise.bounds == PositionNoiseModel::Bounds::kPower ? "power" : "std"},
      {"target_sigma_is_anchor_max", c.target_sigma_is_anchor_max}};
  j["horizon"] = c.horizon;
  j["range"] = c.range;
  j["channel"] = {{"path_loss_exponent", c.channel.path_loss_exponent},
                  {"reference_distance", c.channel.reference_distance},
                  {"rssi_at_reference", c.channel.rssi_at_reference},
                  {"sigma_min_rssi", c.channel.sigma_min_rssi},
                  {"sigma_max_rssi", c.channel.sigma_max_rssi},
                  {"distance_scaling", c.channel.distance_scaling}};
  j["solver"] = solver_name(c.solver);
  j["magd"] = {{"eps_max_t0", c.magd.eps_max_t0},
               {"eps_min_t0", c.magd.eps_min_t0},
               {"eps_min_t", c.magd.eps_min_t},
               {"beta1", c.magd.beta1},
               {"beta2", c.magd.beta2},
               {"momentum", c.magd.momentum},
               {"theta", c.magd.theta},
               {"max_iterations", c.magd.max_iterations},
               {"window", c.magd.window},
               {"persist_inner_discount", c.magd.persist_inner_discount},
               {"cap_enlargement", c.magd.cap_enlargement},
               {"fixed_alpha", c.magd.fixed_alpha ? json(*c.magd.fixed_alpha) : json(nullptr)}};
  j["admm"] = {{"rho", c.admm.rho}, {"k_admm", c.admm.k_admm}};
  j["gd"] = {{"alpha0", c.gd.alpha0}, {"beta", c.gd.beta}, {"k_gd", c.gd.k_gd}};

  const auto& a = c.attacker;
  json atk;
  atk["n_malicious"] = a.n_malicious;
  atk["n_malicious_targets"] = a.n_malicious_targets;
  atk["mode"] = mode_name(a.mode);
  const auto* bias = std::get_if<BiasAttack>(&a.mode);
  const auto* jam = std::get_if<JammingAttack>(&a.mode);
  const auto* mani = std::get_if<ManipulationAttack>(&a.mode);
  atk["bias"] = vec_json(bias ? bias->bias : BiasAttack{}.bias);
  atk["jamming_index"] = jam ? jam->index : JammingAttack{}.index;
  atk["manipulation_index"] = mani ? mani->index : ManipulationAttack{}.index;
  atk["strategy"] = strategy_name(a.strategy);
  const auto* rnd = std::get_if<RandomStrategy>(&a.strategy);
  const auto* crd = std::get_if<CoordinatedStrategy>(&a.strategy);
  atk["rate"] = rnd ? rnd->rate : RandomStrategy{}.rate;
  atk["window"] = crd ? crd->window : CoordinatedStrategy{}.window;
  atk["start"] = crd ? crd->start : CoordinatedStrategy{}.start;
  atk["victim_index"] = c.victim_index;
  j["attacker"] = atk;

  const auto& d = c.defense;
  j["defense"] = {{"tad", d.tad},
                  {"rp", d.rp},
                  {"reward", d.tad_params.reward},
                  {"penalty", d.tad_params.penalty},
                  {"forget", d.tad_params.forget},
                  {"confidence", d.tad_params.confidence},
                  {"sigma_p_min", d.tad_params.sigma_p_min},
                  {"printed_update", d.tad_params.printed_update},
                  {"propagation", d.propagation == PropagationFn::kSquare ? "square" : "identity"},
                  {"malicious_sharing",
                   d.malicious_sharing == ReputationSharing::kInvert ? "invert" : "honest"}};
  j["seed"] = c.seed;
  j["repetitions"] = c.repetitions;
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  Section root(j, "");
  root.read("name", c.name);
  root.read_enum("layout", c.layout, {{"map", Layout::kMap}, {"escort", Layout::kEscort}});
  root.read_enum("placement", c.placement,
                 {{"stationary", Placement::kStationary}, {"uniform", Placement::kUniform}});
  root.read_vec("map_size", c.map_size);
  root.read_vec("escort_half_extent", c.escort_half_extent);
  if (root.has("fleet")) {
    auto s = root.sub("fleet");
    s.read("anchors", c.n_anchors);
    s.read("targets", c.n_targets);
    s.finish();
  }
  if (root.has("mobility")) {
    auto s = root.sub("mobility");
    s.read("speed_min", c.speed_min);
    s.read("speed_max", c.speed_max);
    s.read("speed_redraw_period", c.speed_redraw_period);
    s.read("stop_radius", c.stop_radius);
    s.finish();
  }
  if (root.has("position_noise")) {
    auto s = root.sub("position_noise");
    s.read("lo", c.position_noise.lo);
    s.read("hi", c.position_noise.hi);
    s.read_enum("bounds", c.position_noise.bounds,
                {{"power", PositionNoiseModel::Bounds::kPower}, {"std", PositionNoiseModel::Bounds::kStd}});
    s.read("target_sigma_is_anchor_max", c.target_sigma_is_anchor_max);
    s.finish();
  }
  root.read("horizon", c.horizon);
  root.read("range", c.range);
  if (root.has("channel")) {
    auto s = root.sub("channel");
    s.read("path_loss_exponent", c.channel.path_loss_exponent);
    s.read("reference_distance", c.channel.reference_distance);
    s.read("rssi_at_reference", c.channel.rssi_at_reference);
    s.read("sigma_min_rssi", c.channel.sigma_min_rssi);
    s.read("sigma_max_rssi", c.channel.sigma_max_rssi);
    s.read("distance_scaling", c.channel.distance_scaling);
    s.finish();
  }
  root.read_enum("solver", c.solver,
                 {{"magd", Solver::kMagd}, {"gd", Solver::kGd}, {"ls", Solver::kLs}, {"l1_admm", Solver::kL1Admm}});
  if (root.has("magd")) {
    auto s = root.sub("magd");
    s.read("eps_max_t0", c.magd.eps_max_t0);
    s.read("eps_min_t0", c.magd.eps_min_t0);
    s.read("eps_min_t", c.magd.eps_min_t);
    s.read("beta1", c.magd.beta1);
    s.read("beta2", c.magd.beta2);
    s.read("momentum", c.magd.momentum);
    s.read("theta", c.magd.theta);
    s.read("max_iterations", c.magd.max_iterations);
    s.read("window", c.magd.window);
    s.read("persist_inner_discount", c.magd.persist_inner_discount);
    s.read("cap_enlargement", c.magd.cap_enlargement);
    std::optional<double> fixed;
    if (s.has("fixed_alpha") && !j.at("magd").at("fixed_alpha").is_null()) {
      double v = 0.0;
      s.read("fixed_alpha", v);
      fixed = v;
    } else {
      json ignored;
      s.read("fixed_alpha", ignored);
    }
    c.magd.fixed_alpha = fixed;
    s.finish();
  }
  if (root.has("admm")) {
    auto s = root.sub("admm");
    s.read("rho", c.admm.rho);
    s.read("k_admm", c.admm.k_admm);
    s.finish();
  }
  if (root.has("gd")) {
    auto s = root.sub("gd");
    s.read("alpha0", c.gd.alpha0);
    s.read("beta", c.gd.beta);
    s.read("k_gd", c.gd.k_gd);
    s.finish();
  }
  if (root.has("attacker")) {
    auto s = root.sub("attacker");
    auto& a = c.attacker;
    s.read("n_malicious", a.n_malicious);
    s.read("n_malicious_targets", a.n_malicious_targets);
    BiasAttack bias;
    JammingAttack jam;
    ManipulationAttack mani;
    s.read_vec("bias", bias.bias);
    s.read("jamming_index", jam.index);
    s.read("manipulation_index", mani.index);
    enum class M { kNone, kJam, kBias, kMani } mode = M::kNone;
    s.read_enum("mode", mode,
                {{"none", M::kNone}, {"jamming", M::kJam}, {"bias", M::kBias}, {"manipulation", M::kMani}});
    switch (mode) {
      case M::kNone:
        a.mode = NoAttack{};
        break;
      case M::kJam:
        a.mode = jam;
        break;
      case M::kBias:
        a.mode = bias;
        break;
      case M::kMani:
        a.mode = mani;
        break;
    }
    RandomStrategy rnd;
    CoordinatedStrategy crd;
    s.read("rate", rnd.rate);
    s.read("window", crd.window);
    s.read("start", crd.start);
    enum class S { kRandom, kCoord, kStalk } strat = S::kRandom;
    s.read_enum("strategy", strat,
                {{"random", S::kRandom}, {"coordinated", S::kCoord}, {"stalking", S::kStalk}});
    switch (strat) {
      case S::kRandom:
        a.strategy = rnd;
        break;
      case S::kCoord:
        a.strategy = crd;
        break;
      case S::kStalk:
        a.strategy = StalkingStrategy{};
        break;
    }
    s.read("victim_index", c.victim_index);
    s.finish();
  }
  if (root.has("defense")) {
    auto s = root.sub("defense");
    auto& d = c.defense;
    s.read("tad", d.tad);
    s.read("rp", d.rp);
    s.read("reward", d.tad_params.reward);
    s.read("penalty", d.tad_params.penalty);
    s.read("forget", d.tad_params.forget);
    s.read("confidence", d.tad_params.confidence);
    s.read("sigma_p_min", d.tad_params.sigma_p_min);
    s.read("printed_update", d.tad_params.printed_update);
    s.read_enum("propagation", d.propagation,
                {{"square", PropagationFn::kSquare}, {"identity", PropagationFn::kIdentity}});
    s.read_enum("malicious_sharing", d.malicious_sharing,
                {{"invert", ReputationSharing::kInvert}, {"honest", ReputationSharing::kHonest}});
    s.finish();
  }
  root.read("seed", c.seed);
  root.read("repetitions", c.repetitions);
  root.finish();
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: parse error: {}", path.string(), e.what()));
  }
  return scenario_from_json(j);
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << scenario_to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string s = scenario_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace swarmloc
