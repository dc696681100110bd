#ifndef SENTRYBUS_ERRORS_HPP
#define SENTRYBUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sentrybus {

enum class Errc {
  // crypto
  InvalidPeerPublic,
  MalformedSignature,
  OutputTooLong,
  AuthenticationFailure,
  // identity
  NameTooLong,
  // handshake
  ModeIdentityMismatch,
  CertificateRejected,
  BadSignature,
  SuiteMismatch,
  MalformedMessage,
  NonceMismatch,
  StateError,
  // session
  CounterExhausted,
  UnknownReceiver,
  ReplayDetected,
  BadReceiverTag,
  // pubsub
  BindFailure,
  ProfileConfigError,
  HandshakeFailed,
  Timeout,
  PayloadTooLarge,
  NotConnected,
  DuplicateSubscription,
  // bench
  PeerUnavailable,
  ResultTimeout,
  ZeroElapsed,
  // report
  EmptyInput,
  MissingBaseline,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(errc_name(code)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace sentrybus

#endif
