#include "radvel/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

extern char** environ;

namespace radvel::config {
namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& key, const std::string& what) {
  throw Error(Errc::ConfigError, key + ": " + what);
}

// Reads keys out of one JSON object and remembers which were consumed, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) config_fail(name(key), "expected true/false");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) config_fail(name(key), "expected an integer");
        out = v.get<T>();
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) config_fail(name(key), "expected a number");
        out = v.get<T>();
      } else {
        if (!v.is_string()) config_fail(name(key), "expected a string");
        out = v.get<T>();
      }
    } catch (const json::exception& e) {
      config_fail(name(key), e.what());
    }
  }

  void read_vec3(const std::string& key, Vec3& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      config_fail(name(key), "expected an array of 3 numbers");
    }
    out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }

  const json* child(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  void mark(const std::string& key) { used_.insert(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) config_fail(name(item.key()), "unknown key");
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

RejectorMethod parse_method(const std::string& s, const std::string& key) {
  for (auto m : {RejectorMethod::Ransac, RejectorMethod::Mlesac, RejectorMethod::Gnc, RejectorMethod::None}) {
    if (s == to_string(m)) return m;
  }
  config_fail(key, "unknown rejector method '" + s + "'");
}

LossSpec loss_for_kind(const std::string& s, const std::string& key) {
  if (s == "l2" || s == "ls") return LossSpec::l2();
  if (s == "wls") return LossSpec::l2(true);
  if (s == "truncated_l2" || s == "tls") return LossSpec::truncated_l2();
  if (s == "wtls") return LossSpec::truncated_l2(0.3, true);
  if (s == "huber") return LossSpec::huber();
  if (s == "cauchy") return LossSpec::cauchy();
  if (s == "barron") return LossSpec::barron(1.0);
  if (s == "geman_mcclure") return LossSpec::geman_mcclure();
  if (s == "l1_l2") return LossSpec::l1_l2();
  if (s == "welsch") return LossSpec::welsch();
  config_fail(key, "unknown loss kind '" + s + "'");
}

const char* kind_name(const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::L2: return "l2";
    case LossKind::TruncatedL2: return "truncated_l2";
    case LossKind::Huber: return "huber";
    case LossKind::Cauchy: return "cauchy";
    case LossKind::BarronGeneral: return "barron";
  }
  return "l2";
}

void read_rejector(Section s, RejectorConfig& r) {
  std::string method(to_string(r.method));
  s.read("method", method);
  r.method = parse_method(method, s.name("method"));
  s.read("inlier_threshold", r.inlier_threshold);
  s.read("max_iterations", r.max_iterations);
  s.read("confidence", r.confidence);
  s.read("seed", r.seed);
  s.read("mlesac_sigma", r.mlesac_sigma);
  s.read("mlesac_outlier_span", r.mlesac_outlier_span);
  s.read("mlesac_em_steps", r.mlesac_em_steps);
  s.read("gnc_mu_init", r.gnc_mu_init);
  s.read("gnc_mu_divisor", r.gnc_mu_divisor);
  s.read("gnc_max_outer", r.gnc_max_outer);
  s.read("min_coplanarity", r.min_coplanarity);
  s.finish();
}

void read_loss(Section s, LossSpec& l) {
  if (s.has("kind")) {
    std::string kind;
    s.read("kind", kind);
    l = loss_for_kind(kind, s.name("kind"));
  }
  s.read("scale", l.scale);
  if (const json* a = s.child("alpha")) {
    if (a->is_number()) {
      l.alpha = a->get<double>();
    } else if (a->is_string() && a->get<std::string>() == "-inf") {
      l.alpha = -std::numeric_limits<double>::infinity();
    } else {
      config_fail(s.name("alpha"), "expected a number or \"-inf\"");
    }
  }
  s.read("truncation", l.truncation);
  s.read("snr_weighting", l.snr_weighting);
  s.finish();
}

void read_solver(Section s, SolverConfig& c) {
  s.read("grad_tolerance", c.grad_tolerance);
  s.read("step_tolerance", c.step_tolerance);
  s.read("max_iterations", c.max_iterations);
  s.read("wolfe_c1", c.wolfe_c1);
  s.read("wolfe_c2", c.wolfe_c2);
  s.finish();
}

void read_zero_velocity(Section s, ZeroVelocityConfig& z) {
  s.read("doppler_threshold", z.doppler_threshold);
  s.read("max_exceed_fraction", z.max_exceed_fraction);
  s.read("min_detections", z.min_detections);
  s.finish();
}

void read_filter(Section s, FilterConfig& f, bool& enabled) {
  s.read("enabled", enabled);
  s.read("window_size", f.window_size);
  s.read("norm_threshold", f.norm_threshold);
  s.read("max_acceleration", f.max_acceleration);
  std::string comb(to_string(f.combination));
  s.read("combination", comb);
  if (comb == "reject_on_either") {
    f.combination = GateCombination::RejectOnEither;
  } else if (comb == "require_both") {
    f.combination = GateCombination::RequireBoth;
  } else {
    config_fail(s.name("combination"), "expected reject_on_either or require_both");
  }
  s.finish();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

EstimatorConfig from_json(const json& j) {
  EstimatorConfig cfg;
  Section root(j, "");
  if (const json* c = root.child("rejector")) read_rejector(Section(*c, "rejector"), cfg.rejector);
  if (const json* c = root.child("loss")) read_loss(Section(*c, "loss"), cfg.loss);
  if (const json* c = root.child("solver")) read_solver(Section(*c, "solver"), cfg.solver);
  if (const json* c = root.child("zero_velocity")) {
    read_zero_velocity(Section(*c, "zero_velocity"), cfg.zero_velocity);
  }
  if (const json* c = root.child("filter")) read_filter(Section(*c, "filter"), cfg.filter, cfg.filter_enabled);
  std::string sign = cfg.doppler_sign == DopplerSign::Flipped ? "flipped" : "as_is";
  root.read("doppler_sign", sign);
  if (sign == "as_is") {
    cfg.doppler_sign = DopplerSign::AsIs;
  } else if (sign == "flipped") {
    cfg.doppler_sign = DopplerSign::Flipped;
  } else {
    config_fail("doppler_sign", "expected as_is or flipped");
  }
  root.finish();

  try {
    validate(cfg);
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, e.what());
  }
  return cfg;
}

json to_json(const EstimatorConfig& cfg) {
  const auto& r = cfg.rejector;
  const auto& l = cfg.loss;
  json alpha = std::isinf(l.alpha) ? json("-inf") : json(l.alpha);
  return {
      {"rejector",
       {{"method", std::string(to_string(r.method))},
        {"inlier_threshold", r.inlier_threshold},
        {"max_iterations", r.max_iterations},
        {"confidence", r.confidence},
        {"seed", r.seed},
        {"mlesac_sigma", r.mlesac_sigma},
        {"mlesac_outlier_span", r.mlesac_outlier_span},
        {"mlesac_em_steps", r.mlesac_em_steps},
        {"gnc_mu_init", r.gnc_mu_init},
        {"gnc_mu_divisor", r.gnc_mu_divisor},
        {"gnc_max_outer", r.gnc_max_outer},
        {"min_coplanarity", r.min_coplanarity}}},
      {"loss",
       {{"kind", kind_name(l)},
        {"scale", l.scale},
        {"alpha", alpha},
        {"truncation", l.truncation},
        {"snr_weighting", l.snr_weighting}}},
      {"solver",
       {{"grad_tolerance", cfg.solver.grad_tolerance},
        {"step_tolerance", cfg.solver.step_tolerance},
        {"max_iterations", cfg.solver.max_iterations},
        {"wolfe_c1", cfg.solver.wolfe_c1},
        {"wolfe_c2", cfg.solver.wolfe_c2}}},
      {"zero_velocity",
       {{"doppler_threshold", cfg.zero_velocity.doppler_threshold},
        {"max_exceed_fraction", cfg.zero_velocity.max_exceed_fraction},
        {"min_detections", cfg.zero_velocity.min_detections}}},
      {"filter",
       {{"enabled", cfg.filter_enabled},
        {"window_size", cfg.filter.window_size},
        {"norm_threshold", cfg.filter.norm_threshold},
        {"max_acceleration", cfg.filter.max_acceleration},
        {"combination", std::string(to_string(cfg.filter.combination))}}},
      {"doppler_sign", cfg.doppler_sign == DopplerSign::Flipped ? "flipped" : "as_is"},
  };
}

void apply_env_overrides(json& j, const std::vector<std::pair<std::string, std::string>>& env) {
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, value] : env) {
    if (name.rfind(prefix, 0) != 0) continue;
    std::string rest = lower(name.substr(prefix.size()));
    std::vector<std::string> path;
    std::size_t pos = 0;
    while (true) {
      const auto next = rest.find("__", pos);
      path.push_back(rest.substr(pos, next == std::string::npos ? next : next - pos));
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    if (path.empty() || path.size() > 2 || std::any_of(path.begin(), path.end(), [](const auto& p) { return p.empty(); })) {
      config_fail(name, "malformed override name");
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    json* node = &j;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      node = &child;
    }
    (*node)[path.back()] = parsed;
  }
}

std::vector<std::pair<std::string, std::string>> environment_overrides() {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string prefix = kEnvPrefix;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.rfind(prefix, 0) != 0) continue;
    out.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

EstimatorConfig load(const std::string& path) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open config " + path);
    j = json::parse(in, nullptr, false, true);
    if (j.is_discarded()) throw Error(Errc::ConfigError, path + ": not valid JSON");
  }
  apply_env_overrides(j, environment_overrides());
  return from_json(j);
}

SynthJob synth_job_from_json(const json& j) {
  SynthJob job;
  Section root(j, "");
  if (const json* c = root.child("scene")) {
    Section s(*c, "scene");
    auto& sc = job.scene;
    s.read("n_static", sc.n_static);
    s.read("n_dynamic", sc.n_dynamic);
    s.read("n_ghost", sc.n_ghost);
    s.read_vec3("ego_velocity", sc.ego_velocity);
    s.read("dynamic_offset_min", sc.dynamic_offset_min);
    s.read("dynamic_velocity_range", sc.dynamic_velocity_range);
    s.read("dynamic_offset_signed", sc.dynamic_offset_signed);
    s.read("ghost_bias", sc.ghost_bias);
    s.read("doppler_noise_sigma", sc.doppler_noise_sigma);
    std::string dirs = sc.directions == synth::DirectionModel::ForwardCone ? "forward_cone" : "full_sphere";
    s.read("directions", dirs);
    if (dirs == "full_sphere") {
      sc.directions = synth::DirectionModel::FullSphere;
    } else if (dirs == "forward_cone") {
      sc.directions = synth::DirectionModel::ForwardCone;
    } else {
      config_fail("scene.directions", "expected full_sphere or forward_cone");
    }
    s.read("cone_half_angle", sc.cone_half_angle);
    s.read("range_min", sc.range_min);
    s.read("range_max", sc.range_max);
    s.read("snr_min", sc.snr_min);
    s.read("snr_max", sc.snr_max);
    s.read("seed", sc.seed);
    s.read("shuffle", sc.shuffle);
    s.finish();
    if (sc.n_static < 0 || sc.n_dynamic < 0 || sc.n_ghost < 0) config_fail("scene", "counts must be >= 0");
    if (!(sc.range_min > 0.0) || sc.range_max < sc.range_min) config_fail("scene", "bad range interval");
    if (sc.snr_max < sc.snr_min || sc.snr_min < 0.0) config_fail("scene", "bad snr interval");
    if (sc.dynamic_velocity_range < sc.dynamic_offset_min) config_fail("scene", "bad dynamic offset interval");
    if (sc.doppler_noise_sigma < 0.0) config_fail("scene.doppler_noise_sigma", "must be >= 0");
  }

  job.profile = synth::constant_profile(job.scene.ego_velocity);
  if (const json* c = root.child("profile")) {
    Section s(*c, "profile");
    std::string type = "constant";
    s.read("type", type);
    if (type == "constant") {
      Vec3 v = job.scene.ego_velocity;
      s.read_vec3("velocity", v);
      job.profile = synth::constant_profile(v);
    } else if (type == "sinusoid") {
      Vec3 mean = Vec3::Zero(), amplitude = Vec3::Zero();
      double frequency = 0.1, phase = 0.0;
      s.read_vec3("mean", mean);
      s.read_vec3("amplitude", amplitude);
      s.read("frequency_hz", frequency);
      s.read("phase", phase);
      job.profile = synth::sinusoid_profile(mean, amplitude, frequency, phase);
    } else {
      config_fail("profile.type", "expected constant or sinusoid");
    }
    s.finish();
  }

  if (const json* c = root.child("stream")) {
    Section s(*c, "stream");
    synth::StreamSpec st;
    s.read("rate_hz", st.rate_hz);
    s.read("duration", st.duration);
    s.read("start_time", st.start_time);
    if (const json* w = s.child("wild_indices")) {
      if (!w->is_array()) config_fail("stream.wild_indices", "expected an array");
      for (const auto& x : *w) {
        if (!x.is_number_unsigned()) config_fail("stream.wild_indices", "expected nonnegative integers");
        st.wild_indices.push_back(x.get<std::size_t>());
      }
    }
    s.read_vec3("wild_offset", st.wild_offset);
    s.finish();
    if (!(st.rate_hz > 0.0) || !(st.duration >= 0.0)) config_fail("stream", "rate and duration must be positive");
    job.stream = st;
  }
  root.finish();
  return job;
}

}  // namespace radvel::config
