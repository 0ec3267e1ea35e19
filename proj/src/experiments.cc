#include "modelsel/experiments.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "csv_util.h"
#include "json.hpp"
#include "modelsel/errors.h"

namespace modelsel {
namespace {

// One simulation to run: a fully specified config plus where its summary
// lands in the output.
struct SweepPoint {
  std::string experiment;
  double sweep_value;
  std::size_t policy_rank;
  SimulationConfig config;
};

std::vector<double> Range(double first, double last, double step) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = first + step * i;
    if (v > last + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

void CheckStrictlyIncreasing(const std::vector<double>& values,
                             std::string_view what) {
  if (values.empty()) {
    throw ValidationError(std::string(what) + " must not be empty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError(std::string(what) + " contains a non-finite value");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw ValidationError(std::string(what) + " must be strictly increasing");
    }
  }
}

void CheckWritable(const std::filesystem::path& out) {
  if (out.empty()) throw ValidationError("output path is empty");
  std::error_code ec;
  if (std::filesystem::is_directory(out, ec)) {
    throw ValidationError("output path " + out.string() + " is a directory");
  }
  std::filesystem::path dir = out.parent_path();
  if (dir.empty()) dir = ".";
  if (!std::filesystem::is_directory(dir, ec) ||
      ::access(dir.c_str(), W_OK) != 0) {
    throw ValidationError("output directory " + dir.string() +
                          " does not exist or is not writable");
  }
  if (std::filesystem::exists(out, ec) && ::access(out.c_str(), W_OK) != 0) {
    throw ValidationError("output file " + out.string() + " is not writable");
  }
}

SimulationConfig PointConfig(const ExperimentSpec& spec, double sla_ms,
                             PolicyKind policy) {
  SimulationConfig cfg = spec.base;
  cfg.sla_ms = sla_ms;
  cfg.policy = policy;
  return cfg;
}

std::vector<ResultRow> RunPoints(std::vector<SweepPoint> points,
                                 const ExperimentSpec& spec) {
  // Deterministic output order regardless of completion order.
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) {
                     if (a.sweep_value != b.sweep_value) {
                       return a.sweep_value < b.sweep_value;
                     }
                     if (a.experiment != b.experiment) {
                       return a.experiment < b.experiment;
                     }
                     return a.policy_rank < b.policy_rank;
                   });

  std::vector<ResultRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const SweepPoint& p = points[i];
        std::vector<RequestRecord> records = RunSimulation(p.config);
        ResultRow& row = rows[i];
        row.experiment = p.experiment;
        row.sweep_value = p.sweep_value;
        row.policy = p.config.policy;
        row.n_requests = p.config.n_requests;
        row.seed = p.config.seed;
        row.metrics = Summarize(records);
        if (spec.dump_records) row.records = std::move(records);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = spec.threads != 0 ? spec.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(points.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string CvExperimentLabel(double sla_ms) {
  return std::string(ExperimentName(ExperimentKind::kCvSweep)) + "[sla_ms=" +
         csv::FormatG6(sla_ms) + "]";
}

}  // namespace

std::string_view ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSlaSweep: return "sla_sweep";
    case ExperimentKind::kCvSweep: return "cv_sweep";
    case ExperimentKind::kPolicyCompare: return "policy_compare";
    case ExperimentKind::kTraceReplay: return "trace_replay";
  }
  return "unknown";
}

ExperimentSpec DefaultExperimentSpec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.out = "results.csv";
  switch (kind) {
    case ExperimentKind::kSlaSweep:
      spec.sla_list_ms = Range(30, 300, 10);
      spec.policies = {PolicyKind::kAdaptive, PolicyKind::kStaticGreedy};
      break;
    case ExperimentKind::kCvSweep:
      spec.sla_list_ms = {100, 250};
      spec.cv_list = {0.0, 0.25, 0.5, 0.75, 1.0};
      spec.policies = {PolicyKind::kAdaptive};
      break;
    case ExperimentKind::kPolicyCompare:
      spec.sla_list_ms = Range(30, 400, 10);
      spec.policies = {PolicyKind::kAdaptive, PolicyKind::kPureRandom,
                       PolicyKind::kRelatedRandom, PolicyKind::kRelatedAccurate};
      spec.base.models = BuiltinMeasuredModels();
      break;
    case ExperimentKind::kTraceReplay:
      spec.sla_list_ms = {250};
      spec.policies = {PolicyKind::kStaticLatency, PolicyKind::kStaticAccuracy,
                       PolicyKind::kPureRandom, PolicyKind::kAdaptive};
      spec.base.duplication = true;
      break;
  }
  return spec;
}

void ExperimentSpec::Validate() const {
  CheckStrictlyIncreasing(sla_list_ms, "SLA list");
  for (double sla : sla_list_ms) {
    if (!(sla > 0.0)) throw ValidationError("SLA targets must be > 0");
  }
  if (policies.empty()) throw ValidationError("policy list must not be empty");
  std::set<PolicyKind> unique(policies.begin(), policies.end());
  if (unique.size() != policies.size()) {
    throw ValidationError("policy list contains duplicates");
  }
  SimulationConfig probe = base;
  probe.sla_ms = sla_list_ms.front();
  probe.Validate();

  switch (kind) {
    case ExperimentKind::kSlaSweep:
      break;
    case ExperimentKind::kCvSweep:
      CheckStrictlyIncreasing(cv_list, "CV list");
      for (double cv : cv_list) {
        if (cv < 0.0 || cv > 1.0) {
          throw ValidationError("CV values must lie in [0, 1]");
        }
      }
      if (base.network.kind() != NetworkModel::Kind::kGaussian) {
        throw ValidationError("CV sweep needs a Gaussian network (mean only is used)");
      }
      break;
    case ExperimentKind::kPolicyCompare:
      if (!base.models.Contains(kFictionalModelName)) {
        throw ValidationError("policy comparison requires the '" +
                              std::string(kFictionalModelName) + "' model");
      }
      break;
    case ExperimentKind::kTraceReplay:
      if (base.network.kind() != NetworkModel::Kind::kTrace) {
        throw ValidationError("trace replay requires a trace file");
      }
      if (!base.duplication) {
        throw ValidationError("trace replay requires duplication to be enabled");
      }
      if (!base.models.Without(base.on_device.name)) {
        throw ValidationError("cloud model set is empty once the on-device model is removed");
      }
      break;
  }
  CheckWritable(out);
}

std::vector<ResultRow> RunSlaSweep(const ExperimentSpec& spec) {
  spec.Validate();
  std::vector<SweepPoint> points;
  for (double sla : spec.sla_list_ms) {
    for (std::size_t k = 0; k < spec.policies.size(); ++k) {
      points.push_back({std::string(ExperimentName(ExperimentKind::kSlaSweep)),
                        sla, k, PointConfig(spec, sla, spec.policies[k])});
    }
  }
  return RunPoints(std::move(points), spec);
}

std::vector<ResultRow> RunCvSweep(const ExperimentSpec& spec) {
  spec.Validate();
  const double mean = spec.base.network.mean_ms();
  std::vector<SweepPoint> points;
  for (double cv : spec.cv_list) {
    for (double sla : spec.sla_list_ms) {
      for (std::size_t k = 0; k < spec.policies.size(); ++k) {
        SimulationConfig cfg = PointConfig(spec, sla, spec.policies[k]);
        cfg.network = CvNetwork(mean, cv);
        points.push_back({CvExperimentLabel(sla), cv, k, std::move(cfg)});
      }
    }
  }
  return RunPoints(std::move(points), spec);
}

std::vector<ResultRow> RunPolicyCompare(const ExperimentSpec& spec) {
  spec.Validate();
  std::vector<SweepPoint> points;
  for (double sla : spec.sla_list_ms) {
    for (std::size_t k = 0; k < spec.policies.size(); ++k) {
      points.push_back(
          {std::string(ExperimentName(ExperimentKind::kPolicyCompare)), sla, k,
           PointConfig(spec, sla, spec.policies[k])});
    }
  }
  return RunPoints(std::move(points), spec);
}

std::vector<ResultRow> RunTraceReplay(const ExperimentSpec& spec) {
  spec.Validate();
  const ModelSet cloud = *spec.base.models.Without(spec.base.on_device.name);
  std::vector<SweepPoint> points;
  for (double sla : spec.sla_list_ms) {
    for (std::size_t k = 0; k < spec.policies.size(); ++k) {
      SimulationConfig cfg = PointConfig(spec, sla, spec.policies[k]);
      cfg.models = cloud;
      points.push_back({std::string(ExperimentName(ExperimentKind::kTraceReplay)),
                        sla, k, std::move(cfg)});
    }
  }
  return RunPoints(std::move(points), spec);
}

std::vector<ResultRow> RunExperiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kSlaSweep: return RunSlaSweep(spec);
    case ExperimentKind::kCvSweep: return RunCvSweep(spec);
    case ExperimentKind::kPolicyCompare: return RunPolicyCompare(spec);
    case ExperimentKind::kTraceReplay: return RunTraceReplay(spec);
  }
  throw ValidationError("unknown experiment kind");
}

std::string ModelUsageJson(const MetricsSummary& metrics) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [name, fraction] : metrics.model_usage) {
    // Round through the 6-significant-digit text so the JSON matches the
    // precision of the other columns.
    obj[name] = *csv::ParseDouble(csv::FormatG6(fraction));
  }
  return obj.dump();
}

void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  if (rows.empty()) throw ValidationError("no result rows to write");
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    const MetricsSummary& m = r.metrics;
    out << csv::Escape(r.experiment) << ',' << csv::FormatG6(r.sweep_value) << ','
        << PolicyName(r.policy) << ',' << r.n_requests << ',' << r.seed << ','
        << csv::FormatG6(m.aggregate_accuracy) << ','
        << csv::FormatG6(m.sla_attainment) << ','
        << csv::FormatG6(m.on_device_reliance) << ','
        << csv::FormatG6(m.mean_latency_ms) << ','
        << csv::FormatG6(m.std_latency_ms) << ','
        << csv::Escape(ModelUsageJson(m)) << '\n';
  }
}

void EmitCsv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ValidationError("no result rows to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  WriteResultsCsv(rows, out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

void WriteRecordsCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "experiment,sweep_value,policy,id,t_input_ms,t_output_ms,"
         "nw_estimate_ms,budget_ms,selected,exec_ms,remote_total_ms,source,"
         "response_ms,sla_met,accuracy_used\n";
  for (const auto& row : rows) {
    const std::string prefix = csv::Escape(row.experiment) + ',' +
                               csv::FormatG6(row.sweep_value) + ',' +
                               std::string(PolicyName(row.policy)) + ',';
    for (const auto& r : row.records) {
      out << prefix << r.id << ',' << csv::FormatG6(r.t_input_ms) << ','
          << csv::FormatG6(r.t_output_ms) << ','
          << csv::FormatG6(r.nw_estimate_ms) << ','
          << csv::FormatG6(r.budget_ms) << ',' << csv::Escape(r.selected) << ','
          << csv::FormatG6(r.exec_ms) << ',' << csv::FormatG6(r.remote_total_ms)
          << ',' << SourceName(r.source) << ',' << csv::FormatG6(r.response_ms)
          << ',' << (r.sla_met ? 1 : 0) << ',' << csv::FormatG6(r.accuracy_used)
          << '\n';
    }
  }
}

void EmitRecordsCsv(const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  WriteRecordsCsv(rows, out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

std::filesystem::path RecordsPathFor(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p.replace_extension(".records.csv");
  return p;
}

}  // namespace modelsel
