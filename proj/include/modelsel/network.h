#ifndef MODELSEL_NETWORK_H_
#define MODELSEL_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modelsel/random.h"

namespace modelsel {

// One row of a network trace: measured one-way upload time and, optionally,
// download time.
struct TraceRecord {
  std::string request_id;
  double t_input_ms = 0.0;
  std::optional<double> t_output_ms;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Upload and download legs of one request.
struct Transfer {
  double t_input_ms = 0.0;
  double t_output_ms = 0.0;

  double round_trip_ms() const { return t_input_ms + t_output_ms; }
};

// Source of per-request network transfer times.
//
// Gaussian models are parameterized by the round-trip network time
// (mean_ms, std_ms), i.e. "100 ms +/- 50 ms" of transfer per request. Each
// request takes two independent draws X1, X2 from Normal(mean, std) clamped
// at zero and uses t_input = X1 / 2, t_output = X2 / 2. The policy's
// estimate 2 * t_input therefore follows the configured distribution while
// the realized round trip can differ from it.
//
// Trace models replay records in file order, wrapping around (with a
// warning) when exhausted. A missing download column mirrors the upload.
// Traces hold a cursor: one consumer per copy.
class NetworkModel {
 public:
  enum class Kind { kGaussian, kTrace };

  // Throws ValidationError unless mean_ms > 0 and std_ms >= 0.
  static NetworkModel Gaussian(double mean_ms, double std_ms);
  // Throws ValidationError on an empty trace or negative times.
  static NetworkModel Trace(std::vector<TraceRecord> records,
                            std::string source_name = "<trace>");

  Kind kind() const;
  double mean_ms() const;  // Gaussian only; 0 for traces
  double std_ms() const;   // Gaussian only; 0 for traces
  const std::vector<TraceRecord>& trace() const;  // empty for Gaussian
  std::size_t cursor() const;
  std::size_t wrap_count() const;

  // One round-trip network-time draw. For traces this consumes a record.
  double SampleNetworkTime(Rng& rng);

  // Legs for the next request.
  Transfer NextTransfer(Rng& rng);

 private:
  struct GaussianParams {
    double mean_ms;
    double std_ms;
  };
  struct TraceState {
    std::vector<TraceRecord> records;
    std::string source_name;
    std::size_t cursor = 0;
    std::size_t wraps = 0;
  };

  explicit NetworkModel(std::variant<GaussianParams, TraceState> state)
      : state_(std::move(state)) {}

  const TraceRecord& NextRecord();

  std::variant<GaussianParams, TraceState> state_;
};

NetworkModel GaussianNetwork(double mean_ms, double std_ms);

// GaussianNetwork(mean_ms, cv * mean_ms). Negative cv is a ValidationError;
// cv > 1 is accepted with a warning.
NetworkModel CvNetwork(double mean_ms, double cv);

// CSV with header `request_id,t_input_ms` or
// `request_id,t_input_ms,t_output_ms`.
NetworkModel LoadTrace(const std::filesystem::path& path);
NetworkModel ParseTrace(std::istream& in, const std::string& source_name = "<trace>");
void WriteTrace(const std::vector<TraceRecord>& records, std::ostream& out);

// Conservative round-trip estimate from the measured upload: 2 * t_input.
double EstimateRoundTrip(double t_input_ms);

// Upload-only trace whose round-trip network time 2 * t_input follows
// Normal(mean_network_ms, cv * mean_network_ms) clamped at zero. Stands in
// for unpublished measured traces with known summary statistics.
std::vector<TraceRecord> SynthesizeTrace(double mean_network_ms, double cv,
                                         std::size_t samples,
                                         std::uint64_t seed);

}  // namespace modelsel

#endif  // MODELSEL_NETWORK_H_
