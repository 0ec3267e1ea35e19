#include "modelsel/network.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "csv_util.h"
#include "modelsel/errors.h"
#include "modelsel/log.h"

namespace modelsel {

NetworkModel NetworkModel::Gaussian(double mean_ms, double std_ms) {
  if (!(mean_ms > 0.0) || !std::isfinite(mean_ms)) {
    throw ValidationError("network mean_ms must be > 0");
  }
  if (!(std_ms >= 0.0) || !std::isfinite(std_ms)) {
    throw ValidationError("network std_ms must be >= 0");
  }
  return NetworkModel(GaussianParams{mean_ms, std_ms});
}

NetworkModel NetworkModel::Trace(std::vector<TraceRecord> records,
                                 std::string source_name) {
  if (records.empty()) throw ValidationError(source_name + ": empty trace");
  for (const auto& r : records) {
    if (!(r.t_input_ms >= 0.0) || (r.t_output_ms && !(*r.t_output_ms >= 0.0))) {
      throw ValidationError(source_name + ": negative transfer time for request '" +
                            r.request_id + "'");
    }
  }
  return NetworkModel(TraceState{std::move(records), std::move(source_name)});
}

NetworkModel::Kind NetworkModel::kind() const {
  return std::holds_alternative<GaussianParams>(state_) ? Kind::kGaussian
                                                        : Kind::kTrace;
}

double NetworkModel::mean_ms() const {
  const auto* g = std::get_if<GaussianParams>(&state_);
  return g ? g->mean_ms : 0.0;
}

double NetworkModel::std_ms() const {
  const auto* g = std::get_if<GaussianParams>(&state_);
  return g ? g->std_ms : 0.0;
}

const std::vector<TraceRecord>& NetworkModel::trace() const {
  static const std::vector<TraceRecord> kEmpty;
  const auto* t = std::get_if<TraceState>(&state_);
  return t ? t->records : kEmpty;
}

std::size_t NetworkModel::cursor() const {
  const auto* t = std::get_if<TraceState>(&state_);
  return t ? t->cursor : 0;
}

std::size_t NetworkModel::wrap_count() const {
  const auto* t = std::get_if<TraceState>(&state_);
  return t ? t->wraps : 0;
}

const TraceRecord& NetworkModel::NextRecord() {
  auto& t = std::get<TraceState>(state_);
  if (t.cursor == t.records.size()) {
    t.cursor = 0;
    if (t.wraps++ == 0) {
      Warn("trace " + t.source_name + " exhausted after " +
           std::to_string(t.records.size()) + " samples; wrapping around");
    }
  }
  return t.records[t.cursor++];
}

double NetworkModel::SampleNetworkTime(Rng& rng) {
  if (const auto* g = std::get_if<GaussianParams>(&state_)) {
    return SampleNonNegativeNormal(rng, g->mean_ms, g->std_ms);
  }
  const TraceRecord& r = NextRecord();
  return r.t_input_ms + r.t_output_ms.value_or(r.t_input_ms);
}

Transfer NetworkModel::NextTransfer(Rng& rng) {
  if (const auto* g = std::get_if<GaussianParams>(&state_)) {
    const double up = SampleNonNegativeNormal(rng, g->mean_ms, g->std_ms);
    const double down = SampleNonNegativeNormal(rng, g->mean_ms, g->std_ms);
    return {up / 2.0, down / 2.0};
  }
  const TraceRecord& r = NextRecord();
  return {r.t_input_ms, r.t_output_ms.value_or(r.t_input_ms)};
}

NetworkModel GaussianNetwork(double mean_ms, double std_ms) {
  return NetworkModel::Gaussian(mean_ms, std_ms);
}

NetworkModel CvNetwork(double mean_ms, double cv) {
  if (!(cv >= 0.0) || !std::isfinite(cv)) {
    throw ValidationError("coefficient of variation must be >= 0");
  }
  if (cv > 1.0) {
    Warn("coefficient of variation " + csv::FormatG6(cv) +
         " exceeds 1.0; clamping at zero will bias the network mean");
  }
  return NetworkModel::Gaussian(mean_ms, cv * mean_ms);
}

NetworkModel ParseTrace(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::vector<TraceRecord> records;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (csv::Trim(line).empty()) continue;

    if (columns == 0) {
      const std::string_view header = csv::Trim(line);
      if (header == "request_id,t_input_ms") {
        columns = 2;
      } else if (header == "request_id,t_input_ms,t_output_ms") {
        columns = 3;
      } else {
        throw ParseError(source_name, line_no,
                         "expected header 'request_id,t_input_ms[,t_output_ms]'");
      }
      continue;
    }

    auto fields = csv::SplitLine(line);
    if (!fields) throw ParseError(source_name, line_no, "unterminated quote");
    if (fields->size() != columns) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(fields->size()));
    }
    TraceRecord r;
    r.request_id = std::string(csv::Trim((*fields)[0]));
    auto up = csv::ParseDouble((*fields)[1]);
    if (!up) throw ParseError(source_name, line_no, "non-numeric t_input_ms");
    if (*up < 0.0) throw ParseError(source_name, line_no, "negative t_input_ms");
    r.t_input_ms = *up;
    if (columns == 3) {
      auto down = csv::ParseDouble((*fields)[2]);
      if (!down) throw ParseError(source_name, line_no, "non-numeric t_output_ms");
      if (*down < 0.0) throw ParseError(source_name, line_no, "negative t_output_ms");
      r.t_output_ms = *down;
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ValidationError(source_name + ": empty trace");
  return NetworkModel::Trace(std::move(records), source_name);
}

NetworkModel LoadTrace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return ParseTrace(in, path.string());
}

void WriteTrace(const std::vector<TraceRecord>& records, std::ostream& out) {
  bool with_output = !records.empty() && records.front().t_output_ms.has_value();
  for (const auto& r : records) {
    if (r.t_output_ms.has_value() != with_output) {
      throw ValidationError("trace mixes rows with and without t_output_ms");
    }
  }
  out << (with_output ? "request_id,t_input_ms,t_output_ms\n"
                      : "request_id,t_input_ms\n");
  char buf[64];
  for (const auto& r : records) {
    out << csv::Escape(r.request_id);
    std::snprintf(buf, sizeof(buf), ",%.17g", r.t_input_ms);
    out << buf;
    if (with_output) {
      std::snprintf(buf, sizeof(buf), ",%.17g", *r.t_output_ms);
      out << buf;
    }
    out << '\n';
  }
}

double EstimateRoundTrip(double t_input_ms) { return 2.0 * t_input_ms; }

std::vector<TraceRecord> SynthesizeTrace(double mean_network_ms, double cv,
                                         std::size_t samples,
                                         std::uint64_t seed) {
  NetworkModel net = CvNetwork(mean_network_ms, cv);
  Rng rng(seed);
  std::vector<TraceRecord> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out.push_back({std::to_string(i), net.SampleNetworkTime(rng) / 2.0, std::nullopt});
  }
  return out;
}

}  // namespace modelsel
