#ifndef SENTRYBUS_REPORT_HPP
#define SENTRYBUS_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "sentrybus/bench.hpp"

namespace sentrybus::report {

struct ReportRow {
  std::string profile;
  size_t payload_size = 0;
  std::string metric;  // "latency" (us) or "throughput" (bits/s)
  uint64_t n = 0;      // repetitions with a value
  std::optional<double> mean;
  std::optional<double> median;
  std::optional<double> p95;
  double drop_rate = 0.0;
  std::optional<double> ratio_vs_none;  // throughput rows only

  bool operator==(const ReportRow&) const = default;
};

// Raw observation CSV, one line per BenchRecord:
//   profile,payload_size,metric,value,packets_sent,packets_received,repetition,timestamp_us
std::string records_to_csv(const std::vector<bench::BenchRecord>& records);
std::vector<bench::BenchRecord> records_from_csv(const std::string& text);  // throws IoError

// Groups by (profile, payload size, metric); statistics cover non-dropped
// values only. Throws Error(EmptyInput).
std::vector<ReportRow> aggregate(const std::vector<bench::BenchRecord>& records);

// Fills ratio_vs_none on every throughput row from the none-profile mean at
// the same payload size. Throws Error(MissingBaseline).
void ratio_vs_none(std::vector<ReportRow>& rows);

// Aggregated report CSV:
//   profile,payload_size,metric,n,mean,median,p95,drop_rate,ratio_vs_none
// Fixed six-decimal notation; absent fields are empty cells.
std::string emit_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_csv(const std::string& text);  // throws IoError

// Whitespace table for gnuplot-style plotting; absent fields print as nan.
std::string emit_table(const std::vector<ReportRow>& rows);

}  // namespace sentrybus::report

#endif
