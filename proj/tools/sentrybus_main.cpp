// sentrybus command line: key generation, bench responders, benchmark
// publishers, and report aggregation.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sentrybus/bench.hpp"
#include "sentrybus/bytes.hpp"
#include "sentrybus/errors.hpp"
#include "sentrybus/identity.hpp"
#include "sentrybus/log.hpp"
#include "sentrybus/pubsub.hpp"
#include "sentrybus/report.hpp"

namespace fs = std::filesystem;
using namespace sentrybus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPeer = 3;
constexpr int kExitIo = 4;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::BindFailure:
    case Errc::ProfileConfigError:
    case Errc::NameTooLong:
    case Errc::EmptyInput:
    case Errc::MissingBaseline:
    case Errc::DuplicateSubscription:
      return kExitConfig;
    case Errc::HandshakeFailed:
    case Errc::Timeout:
    case Errc::NotConnected:
    case Errc::PeerUnavailable:
    case Errc::ResultTimeout:
      return kExitPeer;
    case Errc::IoError:
      return kExitIo;
    default:
      return kExitPeer;
  }
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

crypto::Suite parse_suite(const std::string& name) {
  if (name == "modp2048") return crypto::Suite::DhModp2048_256;
  if (name == "p256") return crypto::Suite::EcdhP256;
  throw Error(Errc::ProfileConfigError, "suite must be modp2048 or p256");
}

struct ProfileFlags {
  std::string profile = "none";
  std::string identity_dir;
  std::string root_file;
  std::string psk_file;
};

void add_profile_flags(CLI::App* cmd, ProfileFlags& flags) {
  cmd->add_option("--profile", flags.profile, "Security profile")
      ->check(CLI::IsMember({"none", "crypto", "tunnel"}))
      ->required();
  cmd->add_option("--identity", flags.identity_dir, "Identity directory (crypto)");
  cmd->add_option("--root", flags.root_file, "Trusted root certificate file (crypto)");
  cmd->add_option("--psk", flags.psk_file, "Pre-shared key hex file (tunnel)");
}

// The tunnel key file holds 96 hex characters: 16 bytes of AES-128-CBC key
// followed by 32 bytes of HMAC-SHA256 key.
pubsub::TunnelSecurity load_psk(const fs::path& path) {
  std::string text = read_text_file(path);
  std::string hex;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) hex.push_back(c);
  }
  Bytes raw;
  try {
    raw = from_hex(hex);
  } catch (const Error&) {
    throw Error(Errc::ProfileConfigError, "psk file must be hex");
  }
  if (raw.size() != 48) {
    throw Error(Errc::ProfileConfigError, "psk file must hold 48 hex-encoded bytes");
  }
  pubsub::TunnelSecurity sec;
  std::copy(raw.begin(), raw.begin() + 16, sec.cipher_key.begin());
  std::copy(raw.begin() + 16, raw.end(), sec.mac_key.begin());
  return sec;
}

pubsub::ParticipantConfig build_participant_config(const ProfileFlags& flags,
                                                   const std::string& bind,
                                                   const std::string& fallback_name) {
  pubsub::ParticipantConfig cfg;
  cfg.bind_address = bind;
  cfg.name = fallback_name;

  if (flags.profile == "none") {
    cfg.profile = pubsub::NoSecurity{};
    return cfg;
  }
  if (flags.profile == "tunnel") {
    if (flags.psk_file.empty()) {
      throw Error(Errc::ProfileConfigError, "tunnel profile requires --psk");
    }
    cfg.profile = load_psk(flags.psk_file);
    return cfg;
  }

  if (flags.identity_dir.empty() || flags.root_file.empty()) {
    throw Error(Errc::ProfileConfigError, "crypto profile requires --identity and --root");
  }
  cfg.identity = identity::load_identity(fs::path(flags.identity_dir) / "identity.pem");
  cfg.trusted_root = identity::load_certificate(flags.root_file);
  cfg.name = cfg.identity->certificate.subject_name;

  pubsub::CryptoSecurity sec;
  sec.suite = cfg.identity->certificate.suite;
  // Identities issued with a pinned agreement key run the static-DH mode;
  // identities without one run ephemeral DH.
  sec.fs_mode = cfg.identity->long_term_agreement_private ? handshake::FsMode::Static
                                                          : handshake::FsMode::Ephemeral;
  cfg.profile = sec;
  return cfg;
}

bench::BenchConfig build_bench_config(const ProfileFlags& flags,
                                      const std::vector<size_t>& sizes, int reps, int packets,
                                      int cooloff_us, int timeout_ms, const std::string& topic1,
                                      const std::string& topic2) {
  bench::BenchConfig cfg;
  cfg.profile_label = flags.profile;
  cfg.payload_sizes = sizes;
  cfg.latency_repetitions = reps;
  cfg.throughput_test_repetitions = reps;
  cfg.throughput_packets_per_test = packets;
  cfg.cooling_off = std::chrono::microseconds(cooloff_us);
  cfg.timeout_per_round_trip = std::chrono::milliseconds(timeout_ms);
  cfg.topic1 = topic1;
  cfg.topic2 = topic2;
  for (size_t s : sizes) {
    if (s < 16 || s > 12000) {
      throw Error(Errc::ProfileConfigError, "payload sizes must lie in [16, 12000]");
    }
  }
  return cfg;
}

int run_keygen_ca(const std::string& name, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto drbg = crypto::HmacDrbg::from_os_entropy();
  auto ca = identity::ca_create(name, drbg);
  identity::save_certificate(fs::path(out_dir) / "ca_cert.pem", ca.certificate);
  identity::ParticipantIdentity key;
  key.certificate = ca.certificate;
  key.signing_private = ca.signing_private;
  identity::save_identity(fs::path(out_dir) / "ca_key.pem", key);
  std::cout << "wrote " << out_dir << "/ca_cert.pem and ca_key.pem\n";
  return kExitOk;
}

int run_keygen_identity(const std::string& ca_dir, const std::string& name,
                        const std::string& suite, bool static_dh, const std::string& out_dir) {
  auto ca_key = identity::load_identity(fs::path(ca_dir) / "ca_key.pem");
  identity::CertificateAuthority ca;
  ca.certificate = ca_key.certificate;
  ca.signing_private = ca_key.signing_private;

  fs::create_directories(out_dir);
  auto drbg = crypto::HmacDrbg::from_os_entropy();
  auto id = identity::issue_identity(ca, name, parse_suite(suite), static_dh, drbg);
  identity::save_identity(fs::path(out_dir) / "identity.pem", id);
  identity::save_certificate(fs::path(out_dir) / "cert.pem", id.certificate);
  std::cout << "wrote " << out_dir << "/identity.pem and cert.pem\n";
  return kExitOk;
}

int run_serve(const std::string& mode, const ProfileFlags& flags, const std::string& bind,
              const std::string& topic1, const std::string& topic2) {
  auto cfg = build_participant_config(flags, bind, mode);
  pubsub::Participant participant(std::move(cfg));
  if (mode == "echo") {
    bench::attach_echo_responder(participant, topic1, topic2);
  } else {
    bench::attach_counter_responder(participant, topic1, topic2);
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  participant.start();
  std::cout << "serving " << mode << " on " << participant.address() << " (profile "
            << flags.profile << ")\n"
            << std::flush;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  participant.stop();
  return kExitOk;
}

int run_bench(const std::string& metric, const ProfileFlags& flags, const std::string& bind,
              const std::string& peer, const bench::BenchConfig& bench_cfg,
              const std::string& out_path) {
  auto cfg = build_participant_config(flags, bind, "bench");
  pubsub::Participant participant(std::move(cfg));
  participant.start();
  participant.connect("peer", peer);

  std::vector<bench::BenchRecord> records;
  if (metric == "latency") {
    records = bench::latency_publisher(bench_cfg, participant);
  } else {
    records = bench::throughput_publisher(bench_cfg, participant);
  }
  participant.stop();

  write_text_file(out_path, report::records_to_csv(records));
  auto rows = report::aggregate(records);
  std::cout << report::emit_table(rows);
  std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
  return kExitOk;
}

int run_report(const std::vector<std::string>& inputs, bool ratio, const std::string& format,
               const std::string& out_path) {
  std::vector<bench::BenchRecord> records;
  for (const auto& joined : inputs) {
    std::istringstream ss(joined);
    std::string path;
    while (std::getline(ss, path, ',')) {
      if (path.empty()) continue;
      auto part = report::records_from_csv(read_text_file(path));
      records.insert(records.end(), part.begin(), part.end());
    }
  }
  auto rows = report::aggregate(records);
  if (ratio) report::ratio_vs_none(rows);
  std::string text = format == "table" ? report::emit_table(rows) : report::emit_csv(rows);
  if (out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentrybus: secure topic pub/sub with a latency/throughput harness"};
  app.require_subcommand(1);

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Create CAs and identities");
  keygen->require_subcommand(1);

  std::string ca_name, ca_out;
  auto* kc = keygen->add_subcommand("ca", "Create a self-signed root");
  kc->add_option("--name", ca_name)->required();
  kc->add_option("--out", ca_out)->required();

  std::string id_ca, id_name, id_suite = "p256", id_out;
  bool id_static = false;
  auto* ki = keygen->add_subcommand("identity", "Issue a participant identity");
  ki->add_option("--ca", id_ca)->required();
  ki->add_option("--name", id_name)->required();
  ki->add_option("--suite", id_suite)->check(CLI::IsMember({"modp2048", "p256"}));
  ki->add_flag("--static-dh", id_static, "Pin a long-term agreement key in the certificate");
  ki->add_option("--out", id_out)->required();

  // serve
  std::string serve_mode, serve_bind, serve_topic1, serve_topic2;
  ProfileFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run an echo or counter responder");
  serve->add_option("mode", serve_mode)->check(CLI::IsMember({"echo", "counter"}))->required();
  serve->add_option("--bind", serve_bind)->required();
  add_profile_flags(serve, serve_flags);
  serve->add_option("--topic1", serve_topic1)->required();
  serve->add_option("--topic2", serve_topic2)->required();

  // bench
  std::string bench_metric, bench_bind, bench_peer, bench_out;
  std::string bench_topic1 = "bench/t1", bench_topic2 = "bench/t2";
  std::vector<size_t> bench_sizes{16, 1024, 12000};
  int bench_reps = 100, bench_packets = 100, bench_cooloff_us = 1000, bench_timeout_ms = 250;
  ProfileFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "Measure latency or throughput");
  bench_cmd->add_option("metric", bench_metric)
      ->check(CLI::IsMember({"latency", "throughput"}))
      ->required();
  bench_cmd->add_option("--peer", bench_peer)->required();
  bench_cmd->add_option("--bind", bench_bind)->required();
  add_profile_flags(bench_cmd, bench_flags);
  bench_cmd->add_option("--sizes", bench_sizes)->delimiter(',');
  bench_cmd->add_option("--reps", bench_reps)->required();
  bench_cmd->add_option("--packets", bench_packets);
  bench_cmd->add_option("--cooloff-us", bench_cooloff_us);
  bench_cmd->add_option("--timeout-ms", bench_timeout_ms);
  bench_cmd->add_option("--topic1", bench_topic1);
  bench_cmd->add_option("--topic2", bench_topic2);
  bench_cmd->add_option("--out", bench_out)->required();

  // report
  std::vector<std::string> report_in;
  bool report_ratio = false;
  std::string report_format = "csv", report_out;
  auto* report_cmd = app.add_subcommand("report", "Aggregate record CSVs");
  report_cmd->add_option("--in", report_in)->required();
  report_cmd->add_flag("--ratio", report_ratio, "Fill throughput ratio vs the none profile");
  report_cmd->add_option("--format", report_format)->check(CLI::IsMember({"csv", "table"}));
  report_cmd->add_option("--out", report_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (kc->parsed()) return run_keygen_ca(ca_name, ca_out);
    if (ki->parsed()) return run_keygen_identity(id_ca, id_name, id_suite, id_static, id_out);
    if (serve->parsed()) {
      return run_serve(serve_mode, serve_flags, serve_bind, serve_topic1, serve_topic2);
    }
    if (bench_cmd->parsed()) {
      auto cfg = build_bench_config(bench_flags, bench_sizes, bench_reps, bench_packets,
                                    bench_cooloff_us, bench_timeout_ms, bench_topic1,
                                    bench_topic2);
      return run_bench(bench_metric, bench_flags, bench_bind, bench_peer, cfg, bench_out);
    }
    if (report_cmd->parsed()) {
      return run_report(report_in, report_ratio, report_format, report_out);
    }
  } catch (const Error& e) {
    std::cerr << "sentrybus: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "sentrybus: " << e.what() << "\n";
    return kExitPeer;
  }
  return kExitConfig;
}
