#ifndef SENTRYBUS_BENCH_HPP
#define SENTRYBUS_BENCH_HPP

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sentrybus/bytes.hpp"
#include "sentrybus/pubsub.hpp"

namespace sentrybus::bench {

struct BenchConfig {
  std::string profile_label = "none";
  std::vector<size_t> payload_sizes{16, 1024, 12000};
  int latency_repetitions = 1000;
  int throughput_packets_per_test = 100;  // d
  int throughput_test_repetitions = 100;
  std::chrono::microseconds cooling_off{1000};
  std::chrono::milliseconds start_done_guard{100};
  std::chrono::milliseconds timeout_per_round_trip{250};
  std::chrono::milliseconds result_timeout{2000};
  std::string topic1 = "bench/t1";
  std::string topic2 = "bench/t2";
};

enum class Metric { Latency, Throughput };

struct BenchRecord {
  std::string profile;
  size_t payload_size = 0;
  Metric metric = Metric::Latency;
  std::optional<double> value;  // latency in us, throughput in bits/s; empty = dropped
  uint64_t packets_sent = 0;
  uint64_t packets_received = 0;
  int repetition = 0;
  int64_t timestamp_us = 0;  // wall clock
};

// Control payloads on the bench topic. Data payloads are >= 16 bytes, so the
// 5- and 4-byte markers cannot collide with them.
inline const std::string kStartMarker = "START";
inline const std::string kDoneMarker = "DONE";

// (t2 - t1) / 2 — half of one measured round trip.
std::chrono::nanoseconds estimate_latency(std::chrono::nanoseconds t1,
                                          std::chrono::nanoseconds t2);

// received * payload_bytes * 8 / elapsed-in-seconds. Throws Error(ZeroElapsed).
double calculate_bps(size_t payload_bytes, uint64_t received, std::chrono::nanoseconds elapsed);

// Round-trip latency measurement against a live echo responder.
// Throws Error(PeerUnavailable) when a whole size batch sees zero echoes.
std::vector<BenchRecord> latency_publisher(const BenchConfig& cfg, pubsub::Participant& p);

// Timed burst measurement against a live counter responder.
// Throws Error(ResultTimeout) after three attempts without an rPKT reply.
std::vector<BenchRecord> throughput_publisher(const BenchConfig& cfg, pubsub::Participant& p);

// Responder halves: echo republishes topic1 payloads on topic2 verbatim; the
// counter tracks START / DONE markers and reports the received-packet count.
void attach_echo_responder(pubsub::Participant& p, const std::string& topic1,
                           const std::string& topic2);
void attach_counter_responder(pubsub::Participant& p, const std::string& topic1,
                              const std::string& topic2);

// Arrival-ordered handoff from a subscription handler to the measuring thread.
class PayloadQueue {
 public:
  void push(Bytes payload);
  std::optional<Bytes> pop_until(std::chrono::steady_clock::time_point deadline);
  void clear();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Bytes> items_;
};

}  // namespace sentrybus::bench

#endif
