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

#include "rtolab/metrics_report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace rtolab {
namespace {

constexpr const char* kEventNames[] = {"SEND", "RETRANSMIT", "ACK", "TIMEOUT",
                                       "DROP", "ESTIMATE_UPDATE", "DISCONNECT"};

void append_time(std::string& out, double seconds) {
  const long long micros = std::llround(seconds * 1e6);
  const long long whole = micros / 1'000'000;
  const long long frac = micros % 1'000'000;
  char buf[48];
  const int n = std::snprintf(buf, sizeof buf, "%lld.%06lld", whole, frac);
  out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s, std::size_t line_no) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw MalformedTrace("line " + std::to_string(line_no) + ": bad number '" + tmp + "'");
  return v;
}

template <class Int>
Int parse_int(std::string_view s, std::size_t line_no) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw MalformedTrace("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  return v;
}

void check_row_order(std::span<const TraceRow> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].time < rows[i - 1].time)
      throw MalformedTrace("row " + std::to_string(i) + ": time goes backwards");
    if (rows[i].event == TraceEvent::Retransmit && rows[i].copy < 2)
      throw MalformedTrace("row " + std::to_string(i) + ": RETRANSMIT with copy < 2");
  }
}

}  // namespace

const char* to_string(TraceEvent e) { return kEventNames[static_cast<int>(e)]; }

std::optional<TraceEvent> parse_trace_event(std::string_view s) {
  for (int i = 0; i < 7; ++i)
    if (s == kEventNames[i]) return static_cast<TraceEvent>(i);
  return std::nullopt;
}

double quantize_trace_time(double seconds) { return static_cast<double>(std::llround(seconds * 1e6)) / 1e6; }

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_trace(std::span<const TraceRow> rows) {
  std::string out(kTraceHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    append_time(out, r.time);
    out.push_back(',');
    out += to_string(r.event);
    out.push_back(',');
    out += std::to_string(r.packet_id);
    out.push_back(',');
    out += std::to_string(r.copy);
    out.push_back(',');
    out += format_double(r.estimate_e);
    out.push_back(',');
    out += format_double(r.estimate_v);
    out.push_back(',');
    out += format_double(r.timeout_interval);
    out.push_back(',');
    out += std::to_string(r.retry_count);
    out.push_back('\n');
  }
  return out;
}

void write_trace(std::ostream& out, std::span<const TraceRow> rows) { out << format_trace(rows); }

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw MalformedTrace("missing or wrong trace header");
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw MalformedTrace("line " + std::to_string(line_no) + ": expected 8 fields");
    TraceRow r;
    r.time = parse_double(f[0], line_no);
    const auto ev = parse_trace_event(f[1]);
    if (!ev) throw MalformedTrace("line " + std::to_string(line_no) + ": unknown event '" + std::string(f[1]) + "'");
    r.event = *ev;
    r.packet_id = parse_int<PacketId>(f[2], line_no);
    r.copy = parse_int<std::uint32_t>(f[3], line_no);
    r.estimate_e = parse_double(f[4], line_no);
    r.estimate_v = parse_double(f[5], line_no);
    r.timeout_interval = parse_double(f[6], line_no);
    r.retry_count = parse_int<std::uint64_t>(f[7], line_no);
    rows.push_back(r);
  }
  check_row_order(rows);
  return rows;
}

std::vector<AckPoint> ack_trajectory(std::span<const TraceRow> rows) {
  check_row_order(rows);
  std::vector<AckPoint> points;
  bool open = false;  // last row was an ACK awaiting its optional update
  for (const auto& r : rows) {
    if (r.event == TraceEvent::Ack) {
      points.push_back(AckPoint{r.time, r.packet_id, r.copy, r.estimate_e, r.estimate_e});
      open = true;
      continue;
    }
    if (r.event == TraceEvent::EstimateUpdate) {
      if (!open || points.back().packet_id != r.packet_id)
        throw MalformedTrace("ESTIMATE_UPDATE for packet " + std::to_string(r.packet_id) +
                             " without a preceding ACK");
      points.back().e_after = r.estimate_e;
    }
    open = false;
  }
  return points;
}

std::vector<EstimatePoint> estimate_trajectory(std::span<const TraceRow> rows) {
  std::vector<EstimatePoint> points;
  if (rows.empty()) return points;
  points.push_back({rows.front().time, rows.front().estimate_e});
  for (const auto& r : rows)
    if (r.event == TraceEvent::EstimateUpdate) points.push_back({r.time, r.estimate_e});
  return points;
}

bool detect_divergence(std::span<const EstimatePoint> trajectory, double true_rtt, double factor,
                       double horizon) {
  if (trajectory.empty()) throw std::invalid_argument("detect_divergence: empty trajectory");
  if (!(factor > 1.0)) throw std::invalid_argument("detect_divergence: factor must be > 1");
  const double limit = factor * true_rtt;
  return std::any_of(trajectory.begin(), trajectory.end(),
                     [&](const EstimatePoint& p) { return p.time <= horizon && p.estimate > limit; });
}

bool detect_false_convergence(std::span<const AckPoint> trajectory, double true_rtt, double retrans_rate,
                              std::size_t window, double epsilon) {
  if (window < 10) throw std::invalid_argument("detect_false_convergence: window must be >= 10");
  if (trajectory.size() < window)
    throw std::invalid_argument("detect_false_convergence: trajectory shorter than window");
  const auto tail = trajectory.subspan(trajectory.size() - window);
  const double ceiling = true_rtt * (1.0 - epsilon);
  std::uint64_t retransmissions = 0;
  for (const auto& p : tail) {
    if (!(p.e_after < ceiling)) return false;
    retransmissions += p.copies - 1;
  }
  return static_cast<double>(retransmissions) / static_cast<double>(window) >= retrans_rate;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Diverged: return "Diverged";
    case Verdict::FalseConverged: return "FalseConverged";
  }
  return "?";
}

const char* to_string(AlgorithmClass c) {
  switch (c) {
    case AlgorithmClass::I: return "I";
    case AlgorithmClass::II: return "II";
    case AlgorithmClass::III: return "III";
  }
  return "?";
}

std::optional<double> mean_multi_copy_change(std::span<const AckPoint> trajectory) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : trajectory) {
    if (p.copies < 2) continue;
    sum += p.e_after - p.e_before;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<AlgorithmClass> classify_change(std::optional<double> mean_change, double epsilon) {
  if (!mean_change) return std::nullopt;
  if (*mean_change > epsilon) return AlgorithmClass::I;
  if (*mean_change < -epsilon) return AlgorithmClass::III;
  return AlgorithmClass::II;
}

SummaryReport summarize(std::span<const TraceRow> rows, const SummaryOptions& options) {
  const auto acks = ack_trajectory(rows);  // validates ordering
  SummaryReport s;
  s.drop_count_per_node.assign(options.node_count, 0);
  std::uint64_t forward_drops = 0;
  double completion = -1.0;
  for (const auto& r : rows) {
    switch (r.event) {
      case TraceEvent::Send:
        ++s.packets_offered;
        ++s.total_copies_sent;
        break;
      case TraceEvent::Retransmit: ++s.total_copies_sent; break;
      case TraceEvent::Ack:
        ++s.packets_delivered;
        completion = r.time;
        break;
      case TraceEvent::Timeout: ++s.timeout_count; break;
      case TraceEvent::Drop:
        if (r.copy == 0) break;  // lost ack
        ++forward_drops;
        if (r.retry_count >= s.drop_count_per_node.size())
          throw MalformedTrace("DROP at node " + std::to_string(r.retry_count) + " outside the topology");
        ++s.drop_count_per_node[r.retry_count];
        break;
      case TraceEvent::Disconnect: completion = r.time; break;
      case TraceEvent::EstimateUpdate: break;
    }
  }
  const std::uint64_t accounted = s.packets_delivered + forward_drops;
  s.duplicates_received = s.total_copies_sent > accounted ? s.total_copies_sent - accounted : 0;
  if (!rows.empty()) s.elapsed = completion >= 0.0 ? completion : rows.back().time;
  s.throughput = s.elapsed > 0.0 ? static_cast<double>(s.packets_delivered) / s.elapsed : 0.0;

  const auto estimates = estimate_trajectory(rows);
  if (!estimates.empty()) {
    s.final_E = estimates.back().estimate;
    for (const auto& p : estimates) s.max_E = std::max(s.max_E, p.estimate);
    if (detect_divergence(estimates, options.true_rtt, options.divergence_factor, options.horizon)) {
      s.verdict = Verdict::Diverged;
    } else if (acks.size() >= options.false_convergence_window &&
               detect_false_convergence(acks, options.true_rtt, options.false_convergence_retrans_rate,
                                        options.false_convergence_window, options.false_convergence_epsilon)) {
      s.verdict = Verdict::FalseConverged;
    }
  }
  s.algorithm_class =
      classify_change(mean_multi_copy_change(acks), options.class_epsilon.value_or(0.01 * options.true_rtt));
  return s;
}

std::string format_summary(const SummaryReport& r) {
  std::ostringstream o;
  o << "packets_offered=" << r.packets_offered << '\n'
    << "packets_delivered=" << r.packets_delivered << '\n'
    << "total_copies_sent=" << r.total_copies_sent << '\n'
    << "duplicates_received=" << r.duplicates_received << '\n'
    << "timeout_count=" << r.timeout_count << '\n'
    << "drop_count_per_node=";
  for (std::size_t i = 0; i < r.drop_count_per_node.size(); ++i)
    o << (i ? "," : "") << r.drop_count_per_node[i];
  o << '\n'
    << "elapsed=" << format_double(r.elapsed) << '\n'
    << "throughput=" << format_double(r.throughput) << '\n'
    << "final_E=" << format_double(r.final_E) << '\n'
    << "max_E=" << format_double(r.max_E) << '\n'
    << "verdict=" << to_string(r.verdict) << '\n'
    << "class=" << (r.algorithm_class ? to_string(*r.algorithm_class) : "none") << '\n';
  return o.str();
}

void write_summary(std::ostream& out, const SummaryReport& report) { out << format_summary(report); }

}  // namespace rtolab
