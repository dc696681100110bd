#include "sentrybus/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "sentrybus/errors.hpp"

namespace sentrybus::report {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::IoError, std::string("bad number for ") + what + ": '" + s + "'");
  }
}

uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::IoError, std::string("bad integer for ") + what + ": '" + s + "'");
  }
}

const char* metric_name(bench::Metric m) {
  return m == bench::Metric::Latency ? "latency" : "throughput";
}

struct GroupKey {
  std::string metric;
  std::string profile;
  size_t payload_size;
  bool operator<(const GroupKey& o) const {
    if (metric != o.metric) return metric < o.metric;
    if (profile != o.profile) return profile < o.profile;
    return payload_size < o.payload_size;
  }
};

}  // namespace

std::string records_to_csv(const std::vector<bench::BenchRecord>& records) {
  std::ostringstream out;
  out << "profile,payload_size,metric,value,packets_sent,packets_received,repetition,"
         "timestamp_us\n";
  for (const auto& r : records) {
    out << r.profile << ',' << r.payload_size << ',' << metric_name(r.metric) << ','
        << fmt_opt(r.value) << ',' << r.packets_sent << ',' << r.packets_received << ','
        << r.repetition << ',' << r.timestamp_us << '\n';
  }
  return out.str();
}

std::vector<bench::BenchRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::IoError, "empty records file");
  std::vector<bench::BenchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 8) throw Error(Errc::IoError, "expected 8 columns: " + line);
    bench::BenchRecord r;
    r.profile = cols[0];
    r.payload_size = parse_u64(cols[1], "payload_size");
    if (cols[2] == "latency") {
      r.metric = bench::Metric::Latency;
    } else if (cols[2] == "throughput") {
      r.metric = bench::Metric::Throughput;
    } else {
      throw Error(Errc::IoError, "unknown metric '" + cols[2] + "'");
    }
    if (!cols[3].empty()) r.value = parse_num(cols[3], "value");
    r.packets_sent = parse_u64(cols[4], "packets_sent");
    r.packets_received = parse_u64(cols[5], "packets_received");
    r.repetition = static_cast<int>(parse_u64(cols[6], "repetition"));
    r.timestamp_us = static_cast<int64_t>(parse_u64(cols[7], "timestamp_us"));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ReportRow> aggregate(const std::vector<bench::BenchRecord>& records) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no records to aggregate");

  struct Group {
    std::vector<double> values;
    uint64_t attempted = 0;
    uint64_t sent = 0;
    uint64_t received = 0;
    bench::Metric metric = bench::Metric::Latency;
  };
  std::map<GroupKey, Group> groups;
  for (const auto& r : records) {
    auto& g = groups[{metric_name(r.metric), r.profile, r.payload_size}];
    g.metric = r.metric;
    ++g.attempted;
    g.sent += r.packets_sent;
    g.received += r.packets_received;
    if (r.value) g.values.push_back(*r.value);
  }

  std::vector<ReportRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, g] : groups) {
    ReportRow row;
    row.profile = key.profile;
    row.payload_size = key.payload_size;
    row.metric = key.metric;
    row.n = g.values.size();

    if (g.metric == bench::Metric::Latency) {
      row.drop_rate = g.attempted == 0
                          ? 0.0
                          : static_cast<double>(g.attempted - g.values.size()) /
                                static_cast<double>(g.attempted);
    } else {
      row.drop_rate =
          g.sent == 0 ? 0.0 : 1.0 - static_cast<double>(g.received) / static_cast<double>(g.sent);
    }

    if (!g.values.empty()) {
      std::sort(g.values.begin(), g.values.end());
      double sum = 0;
      for (double v : g.values) sum += v;
      row.mean = sum / static_cast<double>(g.values.size());
      size_t n = g.values.size();
      row.median = n % 2 == 1 ? g.values[n / 2]
                              : (g.values[n / 2 - 1] + g.values[n / 2]) / 2.0;
      size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n)));
      row.p95 = g.values[rank == 0 ? 0 : rank - 1];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void ratio_vs_none(std::vector<ReportRow>& rows) {
  std::map<size_t, std::optional<double>> none_mean;
  for (const auto& row : rows) {
    if (row.metric == "throughput" && row.profile == "none") {
      none_mean[row.payload_size] = row.mean;
    }
  }
  for (auto& row : rows) {
    if (row.metric != "throughput") continue;
    auto it = none_mean.find(row.payload_size);
    if (it == none_mean.end() || !it->second || !row.mean) {
      throw Error(Errc::MissingBaseline,
                  "no none-profile throughput mean for payload size " +
                      std::to_string(row.payload_size));
    }
    row.ratio_vs_none = *row.mean / *it->second;
  }
}

std::string emit_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "profile,payload_size,metric,n,mean,median,p95,drop_rate,ratio_vs_none\n";
  for (const auto& r : rows) {
    out << r.profile << ',' << r.payload_size << ',' << r.metric << ',' << r.n << ','
        << fmt_opt(r.mean) << ',' << fmt_opt(r.median) << ',' << fmt_opt(r.p95) << ','
        << fmt(r.drop_rate) << ',' << fmt_opt(r.ratio_vs_none) << '\n';
  }
  return out.str();
}

std::vector<ReportRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::IoError, "empty report file");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 9) throw Error(Errc::IoError, "expected 9 columns: " + line);
    ReportRow r;
    r.profile = cols[0];
    r.payload_size = parse_u64(cols[1], "payload_size");
    r.metric = cols[2];
    r.n = parse_u64(cols[3], "n");
    if (!cols[4].empty()) r.mean = parse_num(cols[4], "mean");
    if (!cols[5].empty()) r.median = parse_num(cols[5], "median");
    if (!cols[6].empty()) r.p95 = parse_num(cols[6], "p95");
    r.drop_rate = parse_num(cols[7], "drop_rate");
    if (!cols[8].empty()) r.ratio_vs_none = parse_num(cols[8], "ratio_vs_none");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string emit_table(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "# profile payload_size metric n mean median p95 drop_rate ratio_vs_none\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); };
  for (const auto& r : rows) {
    out << r.profile << ' ' << r.payload_size << ' ' << r.metric << ' ' << r.n << ' '
        << cell(r.mean) << ' ' << cell(r.median) << ' ' << cell(r.p95) << ' ' << fmt(r.drop_rate)
        << ' ' << cell(r.ratio_vs_none) << '\n';
  }
  return out.str();
}

}  // namespace sentrybus::report
