#include "sentrybus/bench.hpp"

#include <charconv>
#include <memory>
#include <thread>

#include "sentrybus/crypto.hpp"
#include "sentrybus/errors.hpp"
#include "sentrybus/log.hpp"

namespace sentrybus::bench {

namespace {

int64_t wall_clock_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::optional<uint64_t> parse_count(const Bytes& payload) {
  uint64_t value = 0;
  const char* first = reinterpret_cast<const char*>(payload.data());
  auto [ptr, ec] = std::from_chars(first, first + payload.size(), value);
  if (ec != std::errc() || ptr != first + payload.size() || payload.empty()) {
    return std::nullopt;
  }
  return value;
}

// Timed-loop pacing. A bare sleep_for wakes late by a scheduler-dependent
// margin that varies with how busy the core is, which would swamp the
// per-packet cost the throughput clock is supposed to capture. Sleep to
// just short of the deadline, then spin the rest.
void cooling_off_wait(std::chrono::steady_clock::time_point deadline) {
  constexpr auto kSpinMargin = std::chrono::microseconds(150);
  if (deadline - std::chrono::steady_clock::now() > kSpinMargin) {
    std::this_thread::sleep_until(deadline - kSpinMargin);
  }
  while (std::chrono::steady_clock::now() < deadline) {
  }
}

}  // namespace

void PayloadQueue::push(Bytes payload) {
  {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(payload));
  }
  cv_.notify_one();
}

std::optional<Bytes> PayloadQueue::pop_until(std::chrono::steady_clock::time_point deadline) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_until(lock, deadline, [&] { return !items_.empty(); })) return std::nullopt;
  Bytes front = std::move(items_.front());
  items_.pop_front();
  return front;
}

void PayloadQueue::clear() {
  std::lock_guard lock(mu_);
  items_.clear();
}

std::chrono::nanoseconds estimate_latency(std::chrono::nanoseconds t1,
                                          std::chrono::nanoseconds t2) {
  return (t2 - t1) / 2;
}

double calculate_bps(size_t payload_bytes, uint64_t received, std::chrono::nanoseconds elapsed) {
  if (elapsed.count() <= 0) throw Error(Errc::ZeroElapsed, "elapsed interval must be positive");
  double seconds = std::chrono::duration<double>(elapsed).count();
  return static_cast<double>(received) * static_cast<double>(payload_bytes) * 8.0 / seconds;
}

std::vector<BenchRecord> latency_publisher(const BenchConfig& cfg, pubsub::Participant& p) {
  auto echoes = std::make_shared<PayloadQueue>();
  p.subscribe(cfg.topic2, [echoes](const Bytes& payload) { echoes->push(payload); });

  crypto::HmacDrbg drbg = crypto::HmacDrbg::from_os_entropy();
  std::vector<BenchRecord> records;
  records.reserve(cfg.payload_sizes.size() * static_cast<size_t>(cfg.latency_repetitions));

  for (size_t size : cfg.payload_sizes) {
    size_t echoed = 0;
    for (int rep = 0; rep < cfg.latency_repetitions; ++rep) {
      Bytes payload = drbg.generate(size);
      echoes->clear();

      auto t1 = std::chrono::steady_clock::now();
      p.publish(cfg.topic1, payload);
      auto deadline = t1 + cfg.timeout_per_round_trip;

      BenchRecord rec;
      rec.profile = cfg.profile_label;
      rec.payload_size = size;
      rec.metric = Metric::Latency;
      rec.packets_sent = 1;
      rec.repetition = rep;
      rec.timestamp_us = wall_clock_us();

      for (;;) {
        auto echo = echoes->pop_until(deadline);
        if (!echo) break;  // timed out: this repetition is a drop
        if (*echo != payload) continue;  // stale echo from an earlier repetition
        auto t2 = std::chrono::steady_clock::now();
        rec.packets_received = 1;
        rec.value = std::chrono::duration<double, std::micro>(
                        estimate_latency(t1.time_since_epoch(), t2.time_since_epoch()))
                        .count();
        ++echoed;
        break;
      }
      records.push_back(std::move(rec));
    }
    if (echoed == 0) {
      throw Error(Errc::PeerUnavailable,
                  "no echoes for payload size " + std::to_string(size));
    }
  }
  return records;
}

std::vector<BenchRecord> throughput_publisher(const BenchConfig& cfg, pubsub::Participant& p) {
  auto results = std::make_shared<PayloadQueue>();
  p.subscribe(cfg.topic2, [results](const Bytes& payload) { results->push(payload); });

  crypto::HmacDrbg drbg = crypto::HmacDrbg::from_os_entropy();
  std::vector<BenchRecord> records;
  records.reserve(cfg.payload_sizes.size() * static_cast<size_t>(cfg.throughput_test_repetitions));

  for (size_t size : cfg.payload_sizes) {
    for (int test = 0; test < cfg.throughput_test_repetitions; ++test) {
      std::optional<uint64_t> rpkt;
      std::chrono::nanoseconds elapsed{0};

      for (int attempt = 0; attempt < 3 && !rpkt; ++attempt) {
        Bytes payload = drbg.generate(size);
        results->clear();

        p.publish(cfg.topic1, as_view(kStartMarker));
        std::this_thread::sleep_for(cfg.start_done_guard);

        auto clock_start = std::chrono::steady_clock::now();
        for (int i = 0; i < cfg.throughput_packets_per_test; ++i) {
          p.publish(cfg.topic1, payload);
          cooling_off_wait(std::chrono::steady_clock::now() + cfg.cooling_off);
        }
        elapsed = std::chrono::steady_clock::now() - clock_start;

        std::this_thread::sleep_for(cfg.start_done_guard);
        p.publish(cfg.topic1, as_view(kDoneMarker));

        auto deadline = std::chrono::steady_clock::now() + cfg.result_timeout;
        while (!rpkt) {
          auto reply = results->pop_until(deadline);
          if (!reply) break;
          rpkt = parse_count(*reply);  // non-numeric payloads are stale noise
        }
        if (!rpkt) {
          SB_LOG_INFO("throughput test %d (size %zu) got no result; re-running", test, size);
        }
      }
      if (!rpkt) {
        throw Error(Errc::ResultTimeout,
                    "no packet-count reply after 3 attempts (size " + std::to_string(size) + ")");
      }

      BenchRecord rec;
      rec.profile = cfg.profile_label;
      rec.payload_size = size;
      rec.metric = Metric::Throughput;
      rec.packets_sent = static_cast<uint64_t>(cfg.throughput_packets_per_test);
      rec.packets_received = *rpkt;
      rec.value = calculate_bps(size, *rpkt, elapsed);
      rec.repetition = test;
      rec.timestamp_us = wall_clock_us();
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void attach_echo_responder(pubsub::Participant& p, const std::string& topic1,
                           const std::string& topic2) {
  p.subscribe(topic1, [&p, topic2](const Bytes& payload) {
    try {
      p.publish(topic2, payload);
    } catch (const std::exception& e) {
      SB_LOG_DEBUG("echo send failed: %s", e.what());
    }
  });
}

void attach_counter_responder(pubsub::Participant& p, const std::string& topic1,
                              const std::string& topic2) {
  auto count = std::make_shared<uint64_t>(0);
  p.subscribe(topic1, [&p, topic2, count](const Bytes& payload) {
    if (payload.size() == kStartMarker.size() &&
        std::equal(payload.begin(), payload.end(), kStartMarker.begin())) {
      *count = 0;
      return;
    }
    if (payload.size() == kDoneMarker.size() &&
        std::equal(payload.begin(), payload.end(), kDoneMarker.begin())) {
      try {
        p.publish(topic2, as_view(std::to_string(*count)));
      } catch (const std::exception& e) {
        SB_LOG_DEBUG("count reply failed: %s", e.what());
      }
      *count = 0;
      return;
    }
    ++*count;
  });
}

}  // namespace sentrybus::bench
