#ifndef MODELSEL_EXPERIMENTS_H_
#define MODELSEL_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelsel/policy.h"
#include "modelsel/simulator.h"

namespace modelsel {

enum class ExperimentKind { kSlaSweep, kCvSweep, kPolicyCompare, kTraceReplay };

std::string_view ExperimentName(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSlaSweep;
  std::vector<double> sla_list_ms;
  std::vector<double> cv_list;  // CV sweep only
  std::vector<PolicyKind> policies;
  // Network, models, on-device profile, seed, request count and
  // duplication for every point. sla_ms and policy are overwritten per point.
  SimulationConfig base;
  std::filesystem::path out;
  bool dump_records = false;
  // Worker threads for sweep points; 0 picks hardware concurrency.
  unsigned threads = 0;

  // Fail-fast checks run before any simulation. Throws ValidationError.
  void Validate() const;
};

// Defaults per experiment family:
//   SLA sweep:       SLA 30..300 step 10, {adaptive, static_greedy}
//   CV sweep:        CV {0, .25, .5, .75, 1}, SLA {100, 250}, {adaptive}
//   policy compare:  SLA 30..400 step 10, all 12 measured rows,
//                    {adaptive, pure_random, related_random, related_accurate}
//   trace replay:    SLA {250}, duplication on,
//                    {static_latency, static_accuracy, pure_random, adaptive};
//                    base.network must be replaced by a trace.
// All use Gaussian(100, 50) network time and 10,000 requests.
ExperimentSpec DefaultExperimentSpec(ExperimentKind kind);

struct ResultRow {
  std::string experiment;
  double sweep_value = 0.0;
  PolicyKind policy = PolicyKind::kAdaptive;
  std::uint64_t n_requests = 0;
  std::uint64_t seed = 0;
  MetricsSummary metrics;
  // Filled only when ExperimentSpec::dump_records is set.
  std::vector<RequestRecord> records;
};

std::vector<ResultRow> RunSlaSweep(const ExperimentSpec& spec);
std::vector<ResultRow> RunCvSweep(const ExperimentSpec& spec);
std::vector<ResultRow> RunPolicyCompare(const ExperimentSpec& spec);
std::vector<ResultRow> RunTraceReplay(const ExperimentSpec& spec);
std::vector<ResultRow> RunExperiment(const ExperimentSpec& spec);

inline constexpr std::string_view kResultsHeader =
    "experiment,sweep_value,policy,n_requests,seed,aggregate_accuracy,"
    "sla_attainment,on_device_reliance,mean_latency_ms,std_latency_ms,"
    "model_usage_json";

// Compact JSON object, keys sorted, fractions to 6 significant digits.
std::string ModelUsageJson(const MetricsSummary& metrics);

// Header plus one line per row in the given order. Throws ValidationError
// on empty rows.
void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out);
// Throws IoError when the file cannot be written.
void EmitCsv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

// Per-request dump of every row that carries records.
void WriteRecordsCsv(const std::vector<ResultRow>& rows, std::ostream& out);
void EmitRecordsCsv(const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path);

// `<out stem>.records.csv` next to the results file.
std::filesystem::path RecordsPathFor(const std::filesystem::path& out);

}  // namespace modelsel

#endif  // MODELSEL_EXPERIMENTS_H_
