#include "modelsel/simulator.h"

#include <cmath>

#include "modelsel/errors.h"

namespace modelsel {

ModelProfile DefaultOnDeviceModel() {
  return ModelProfile{"MobileNetV1_128 0.25", 0.414, 40.0, 5.0};
}

void SimulationConfig::Validate() const {
  if (!(sla_ms > 0.0) || !std::isfinite(sla_ms)) {
    throw ValidationError("sla_ms must be > 0");
  }
  if (n_requests < 1) throw ValidationError("n_requests must be >= 1");
  on_device.Validate();
}

RequestRecord SimulateRequest(const SimulationConfig& cfg, NetworkModel& network,
                              std::uint64_t id, Rng& rng) {
  RequestRecord rec;
  rec.id = id;

  const Transfer transfer = network.NextTransfer(rng);
  rec.t_input_ms = transfer.t_input_ms;
  rec.t_output_ms = transfer.t_output_ms;

  const Budget budget = ComputeBudget(cfg.sla_ms, transfer.t_input_ms);
  rec.nw_estimate_ms = budget.nw_estimate_ms;
  rec.budget_ms = budget.budget_ms;

  const ModelProfile model =
      SelectModel(cfg.policy, cfg.models, cfg.sla_ms, budget, rng);
  rec.selected = model.name;
  rec.exec_ms = SampleNonNegativeNormal(rng, model.exec_mean_ms, model.exec_std_ms);
  rec.remote_total_ms = rec.t_input_ms + rec.exec_ms + rec.t_output_ms;

  if (cfg.duplication && rec.remote_total_ms > cfg.sla_ms) {
    // The local copy started with the request, so its completion time is
    // just its own execution time.
    rec.source = ResultSource::kOnDevice;
    rec.response_ms = SampleNonNegativeNormal(rng, cfg.on_device.exec_mean_ms,
                                              cfg.on_device.exec_std_ms);
    rec.sla_met = rec.response_ms <= cfg.sla_ms;
    rec.accuracy_used = cfg.on_device.accuracy;
  } else {
    rec.source = ResultSource::kRemote;
    rec.response_ms = rec.remote_total_ms;
    rec.sla_met = rec.remote_total_ms <= cfg.sla_ms;
    rec.accuracy_used = model.accuracy;
  }
  return rec;
}

std::vector<RequestRecord> RunSimulation(const SimulationConfig& cfg) {
  cfg.Validate();
  NetworkModel network = cfg.network;
  std::vector<RequestRecord> records;
  records.reserve(cfg.n_requests);
  for (std::uint64_t id = 0; id < cfg.n_requests; ++id) {
    Rng rng = MakeSubstream(cfg.seed, id);
    records.push_back(SimulateRequest(cfg, network, id, rng));
  }
  return records;
}

MetricsSummary Summarize(std::span<const RequestRecord> records) {
  if (records.empty()) throw ValidationError("cannot summarize zero records");
  const double n = static_cast<double>(records.size());

  MetricsSummary s;
  double accuracy_sum = 0.0;
  double latency_sum = 0.0;
  std::size_t met = 0;
  std::size_t on_device = 0;
  std::map<std::string, std::size_t> usage;
  for (const auto& r : records) {
    accuracy_sum += r.accuracy_used;
    latency_sum += r.response_ms;
    met += r.sla_met ? 1 : 0;
    on_device += r.source == ResultSource::kOnDevice ? 1 : 0;
    ++usage[r.selected];
  }
  s.aggregate_accuracy = accuracy_sum / n;
  s.sla_attainment = static_cast<double>(met) / n;
  s.on_device_reliance = static_cast<double>(on_device) / n;
  s.mean_latency_ms = latency_sum / n;

  double sq = 0.0;
  for (const auto& r : records) {
    const double d = r.response_ms - s.mean_latency_ms;
    sq += d * d;
  }
  s.std_latency_ms = std::sqrt(sq / n);

  for (const auto& [name, count] : usage) {
    s.model_usage[name] = static_cast<double>(count) / n;
  }
  return s;
}

std::string_view SourceName(ResultSource source) {
  return source == ResultSource::kOnDevice ? "on_device" : "remote";
}

}  // namespace modelsel
