#include "modelsel/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "csv_util.h"
#include "json.hpp"
#include "modelsel/errors.h"

namespace modelsel {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "sla_ms",     "sla_list_ms", "cv_list",     "n_requests",  "seed",
    "policy",     "policies",    "duplication", "network",     "trace_path",
    "models_path", "on_device",  "out",         "dump_records", "threads"};
const std::set<std::string> kNetworkKeys = {"kind", "mean_ms", "std_ms", "cv"};
const std::set<std::string> kOnDeviceKeys = {"name", "accuracy_pct", "mean_ms",
                                             "std_ms"};

void RejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ValidationError("unknown config key '" + std::string(where) + key + "'");
    }
  }
}

double Number(const json& v, std::string_view key) {
  if (!v.is_number()) throw ValidationError("config key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::uint64_t Count(const json& v, std::string_view key) {
  if (!v.is_number_unsigned()) {
    throw ValidationError("config key '" + std::string(key) +
                          "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool Bool(const json& v, std::string_view key) {
  if (!v.is_boolean()) throw ValidationError("config key '" + std::string(key) + "' must be true or false");
  return v.get<bool>();
}

std::string String(const json& v, std::string_view key) {
  if (!v.is_string()) throw ValidationError("config key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> NumberList(const json& v, std::string_view key) {
  if (!v.is_array()) throw ValidationError("config key '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const auto& item : v) out.push_back(Number(item, key));
  return out;
}

PolicyKind Policy(const json& v) {
  const std::string name = String(v, "policy");
  auto kind = ParsePolicyKind(name);
  if (!kind) throw ValidationError("unknown policy '" + name + "'");
  return *kind;
}

std::filesystem::path Resolve(const std::filesystem::path& p,
                              const std::filesystem::path& base_dir) {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

struct PendingPaths {
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> models;
  bool trace_requested = false;
};

PendingPaths ApplyConfig(ExperimentSpec& spec, const json& cfg,
                         const std::filesystem::path& base_dir) {
  if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
  RejectUnknownKeys(cfg, kTopLevelKeys, "");
  PendingPaths paths;

  if (cfg.contains("sla_ms") && cfg.contains("sla_list_ms")) {
    throw ValidationError("give either sla_ms or sla_list_ms, not both");
  }
  if (cfg.contains("sla_ms")) spec.sla_list_ms = {Number(cfg["sla_ms"], "sla_ms")};
  if (cfg.contains("sla_list_ms")) spec.sla_list_ms = NumberList(cfg["sla_list_ms"], "sla_list_ms");
  if (cfg.contains("cv_list")) spec.cv_list = NumberList(cfg["cv_list"], "cv_list");
  if (cfg.contains("n_requests")) spec.base.n_requests = Count(cfg["n_requests"], "n_requests");
  if (cfg.contains("seed")) spec.base.seed = Count(cfg["seed"], "seed");

  if (cfg.contains("policy") && cfg.contains("policies")) {
    throw ValidationError("give either policy or policies, not both");
  }
  if (cfg.contains("policy")) spec.policies = {Policy(cfg["policy"])};
  if (cfg.contains("policies")) {
    if (!cfg["policies"].is_array()) throw ValidationError("config key 'policies' must be an array");
    spec.policies.clear();
    for (const auto& p : cfg["policies"]) spec.policies.push_back(Policy(p));
  }
  if (cfg.contains("duplication")) spec.base.duplication = Bool(cfg["duplication"], "duplication");
  if (cfg.contains("dump_records")) spec.dump_records = Bool(cfg["dump_records"], "dump_records");
  if (cfg.contains("threads")) spec.threads = static_cast<unsigned>(Count(cfg["threads"], "threads"));
  if (cfg.contains("out")) spec.out = String(cfg["out"], "out");
  if (cfg.contains("trace_path")) {
    paths.trace = Resolve(String(cfg["trace_path"], "trace_path"), base_dir);
  }
  if (cfg.contains("models_path")) {
    paths.models = Resolve(String(cfg["models_path"], "models_path"), base_dir);
  }

  if (cfg.contains("network")) {
    const json& net = cfg["network"];
    if (!net.is_object()) throw ValidationError("config key 'network' must be an object");
    RejectUnknownKeys(net, kNetworkKeys, "network.");
    const std::string kind = net.contains("kind") ? String(net["kind"], "network.kind")
                                                  : std::string("gaussian");
    const double mean = net.contains("mean_ms") ? Number(net["mean_ms"], "network.mean_ms")
                                                : 100.0;
    if (kind == "gaussian") {
      if (net.contains("cv")) throw ValidationError("network.cv requires network.kind = \"cv\"");
      const double stddev = net.contains("std_ms") ? Number(net["std_ms"], "network.std_ms")
                                                   : 50.0;
      spec.base.network = GaussianNetwork(mean, stddev);
    } else if (kind == "cv") {
      if (net.contains("std_ms")) throw ValidationError("network.std_ms conflicts with network.kind = \"cv\"");
      const double cv = net.contains("cv") ? Number(net["cv"], "network.cv") : 0.5;
      spec.base.network = CvNetwork(mean, cv);
    } else if (kind == "trace") {
      paths.trace_requested = true;
    } else {
      throw ValidationError("network.kind must be gaussian, cv or trace");
    }
  }

  if (cfg.contains("on_device")) {
    const json& od = cfg["on_device"];
    if (!od.is_object()) throw ValidationError("config key 'on_device' must be an object");
    RejectUnknownKeys(od, kOnDeviceKeys, "on_device.");
    ModelProfile& p = spec.base.on_device;
    if (od.contains("name")) p.name = String(od["name"], "on_device.name");
    if (od.contains("accuracy_pct")) p.accuracy = Number(od["accuracy_pct"], "on_device.accuracy_pct") / 100.0;
    if (od.contains("mean_ms")) p.exec_mean_ms = Number(od["mean_ms"], "on_device.mean_ms");
    if (od.contains("std_ms")) p.exec_std_ms = Number(od["std_ms"], "on_device.std_ms");
    p.Validate();
  }
  return paths;
}

ExperimentSpec Build(ExperimentKind kind, const json* cfg,
                     const std::filesystem::path& base_dir,
                     const ExperimentOverrides& o) {
  ExperimentSpec spec = DefaultExperimentSpec(kind);
  PendingPaths paths;
  if (cfg != nullptr) paths = ApplyConfig(spec, *cfg, base_dir);

  if (o.seed) spec.base.seed = *o.seed;
  if (o.n_requests) spec.base.n_requests = *o.n_requests;
  if (o.out) spec.out = *o.out;
  if (o.dump_records) spec.dump_records = *o.dump_records;
  if (o.sla_list_ms) spec.sla_list_ms = *o.sla_list_ms;
  if (o.cv_list) spec.cv_list = *o.cv_list;
  if (o.policies) spec.policies = *o.policies;
  if (o.duplication) spec.base.duplication = *o.duplication;
  if (o.threads) spec.threads = *o.threads;
  if (o.trace_path) paths.trace = *o.trace_path;
  if (o.models_path) paths.models = *o.models_path;

  if (paths.trace_requested && !paths.trace) {
    throw ValidationError("network.kind = \"trace\" requires trace_path");
  }
  if (paths.models) spec.base.models = LoadModels(*paths.models);
  if (paths.trace) spec.base.network = LoadTrace(*paths.trace);
  return spec;
}

}  // namespace

ExperimentSpec BuildExperimentSpecFromText(ExperimentKind kind,
                                           std::string_view config_json,
                                           const std::filesystem::path& base_dir,
                                           const ExperimentOverrides& overrides) {
  json cfg;
  try {
    cfg = json::parse(config_json.begin(), config_json.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return Build(kind, &cfg, base_dir, overrides);
}

ExperimentSpec BuildExperimentSpec(
    ExperimentKind kind, const std::optional<std::filesystem::path>& config_path,
    const ExperimentOverrides& overrides) {
  if (!config_path) return Build(kind, nullptr, {}, overrides);
  std::ifstream in(*config_path);
  if (!in) throw IoError("cannot open config file " + config_path->string());
  std::stringstream buf;
  buf << in.rdbuf();
  return BuildExperimentSpecFromText(kind, buf.str(), config_path->parent_path(),
                                     overrides);
}

std::vector<double> ParseNumberList(std::string_view text) {
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string> range;
    std::string t(text);
    std::stringstream ss(t);
    std::string piece;
    while (std::getline(ss, piece, ':')) range.push_back(piece);
    if (range.size() != 3) throw ValidationError("range must be start:stop:step");
    auto start = csv::ParseDouble(range[0]);
    auto stop = csv::ParseDouble(range[1]);
    auto step = csv::ParseDouble(range[2]);
    if (!start || !stop || !step || !(*step > 0.0)) {
      throw ValidationError("bad range '" + t + "'");
    }
    if (*stop < *start) throw ValidationError("range '" + t + "' is empty");
    if ((*stop - *start) / *step > 1e6) {
      throw ValidationError("range '" + t + "' has too many points");
    }
    std::vector<double> out;
    for (int i = 0;; ++i) {
      const double v = *start + *step * i;
      if (v > *stop + 1e-9) break;
      out.push_back(v);
    }
    return out;
  }
  auto fields = csv::SplitLine(text);
  if (!fields) throw ValidationError("bad number list");
  std::vector<double> out;
  for (const auto& f : *fields) {
    auto v = csv::ParseDouble(f);
    if (!v) throw ValidationError("bad number '" + f + "' in list");
    out.push_back(*v);
  }
  return out;
}

std::vector<PolicyKind> ParsePolicyList(std::string_view text) {
  auto fields = csv::SplitLine(text);
  if (!fields) throw ValidationError("bad policy list");
  std::vector<PolicyKind> out;
  for (const auto& f : *fields) {
    const std::string name(csv::Trim(f));
    auto kind = ParsePolicyKind(name);
    if (!kind) throw ValidationError("unknown policy '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

}  // namespace modelsel
