// Copyright 2026 The rtolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtolab/rtt_estimation.hpp"

namespace rtolab {

enum class TraceEvent { Send, Retransmit, Ack, Timeout, Drop, EstimateUpdate, Disconnect };

const char* to_string(TraceEvent e);
std::optional<TraceEvent> parse_trace_event(std::string_view s);

/// One observable event.
///
/// Column conventions beyond the obvious:
///   ACK             one row per newly acknowledged packet; copy is the number
///                   of copies sent, estimate_* are the values before the
///                   packet's sample is applied.
///   ESTIMATE_UPDATE follows the ACK row of the same packet when the estimate
///                   changed state; estimate_* are the new values and
///                   timeout_interval the resulting first timeout.
///   DROP            retry_count holds the index of the dropping node (0 is
///                   the source); copy 0 marks a lost ack.
struct TraceRow {
  double time = 0.0;  ///< seconds, quantized to microseconds
  TraceEvent event = TraceEvent::Send;
  PacketId packet_id = 0;
  std::uint32_t copy = 0;
  double estimate_e = 0.0;
  double estimate_v = 0.0;
  double timeout_interval = 0.0;
  std::uint64_t retry_count = 0;

  bool operator==(const TraceRow&) const = default;
};

inline constexpr std::string_view kTraceHeader =
    "time,event,packet_id,copy,estimate_e,estimate_v,timeout_interval,retry_count";

/// Rounds seconds to the microsecond grid used by trace files.
double quantize_trace_time(double seconds);

void write_trace(std::ostream& out, std::span<const TraceRow> rows);
std::string format_trace(std::span<const TraceRow> rows);

class MalformedTrace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<TraceRow> read_trace(std::istream& in);

/// Per acknowledged packet: the estimate around its ack.
struct AckPoint {
  double time = 0.0;
  PacketId packet_id = 0;
  std::uint32_t copies = 1;
  double e_before = 0.0;
  double e_after = 0.0;
};

struct EstimatePoint {
  double time = 0.0;
  double estimate = 0.0;
};

/// Throws MalformedTrace on ordering or column violations.
std::vector<AckPoint> ack_trajectory(std::span<const TraceRow> rows);
/// Initial estimate followed by every estimate change.
std::vector<EstimatePoint> estimate_trajectory(std::span<const TraceRow> rows);

/// True iff some estimate within `horizon` exceeds factor * true_rtt.
bool detect_divergence(std::span<const EstimatePoint> trajectory, double true_rtt, double factor,
                       double horizon);

/// True iff the last `window` acks all leave the estimate below
/// true_rtt * (1 - epsilon) while averaging at least `retrans_rate`
/// retransmissions per packet.
bool detect_false_convergence(std::span<const AckPoint> trajectory, double true_rtt, double retrans_rate,
                              std::size_t window, double epsilon = 0.2);

enum class Verdict { Bounded, Diverged, FalseConverged };
enum class AlgorithmClass { I, II, III };

const char* to_string(Verdict v);
const char* to_string(AlgorithmClass c);

/// Mean estimate change across multi-copy acks; nullopt without any.
std::optional<double> mean_multi_copy_change(std::span<const AckPoint> trajectory);
std::optional<AlgorithmClass> classify_change(std::optional<double> mean_change, double epsilon);

struct SummaryOptions {
  double true_rtt = 1.0;
  std::size_t node_count = 2;
  double divergence_factor = 100.0;
  double horizon = 1e300;
  double false_convergence_epsilon = 0.2;
  double false_convergence_retrans_rate = 0.5;
  std::size_t false_convergence_window = 10;
  /// Dead band for the class test; nullopt is 1% of true_rtt.
  std::optional<double> class_epsilon;
};

struct SummaryReport {
  std::uint64_t packets_offered = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t total_copies_sent = 0;
  std::uint64_t duplicates_received = 0;
  std::uint64_t timeout_count = 0;
  std::vector<std::uint64_t> drop_count_per_node;
  double elapsed = 0.0;
  double throughput = 0.0;
  double final_E = 0.0;
  double max_E = 0.0;
  Verdict verdict = Verdict::Bounded;
  std::optional<AlgorithmClass> algorithm_class;

  bool operator==(const SummaryReport&) const = default;
};

/// Everything is derived from the rows, so a trace file read back gives the
/// same report. duplicates_received assumes the run drained: copies sent
/// minus packets delivered minus copies dropped on the forward path.
SummaryReport summarize(std::span<const TraceRow> rows, const SummaryOptions& options);

/// key=value, one field per line.
void write_summary(std::ostream& out, const SummaryReport& report);
std::string format_summary(const SummaryReport& report);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace rtolab
