#include "sentrybus/errors.hpp"

namespace sentrybus {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidPeerPublic: return "InvalidPeerPublic";
    case Errc::MalformedSignature: return "MalformedSignature";
    case Errc::OutputTooLong: return "OutputTooLong";
    case Errc::AuthenticationFailure: return "AuthenticationFailure";
    case Errc::NameTooLong: return "NameTooLong";
    case Errc::ModeIdentityMismatch: return "ModeIdentityMismatch";
    case Errc::CertificateRejected: return "CertificateRejected";
    case Errc::BadSignature: return "BadSignature";
    case Errc::SuiteMismatch: return "SuiteMismatch";
    case Errc::MalformedMessage: return "MalformedMessage";
    case Errc::NonceMismatch: return "NonceMismatch";
    case Errc::StateError: return "StateError";
    case Errc::CounterExhausted: return "CounterExhausted";
    case Errc::UnknownReceiver: return "UnknownReceiver";
    case Errc::ReplayDetected: return "ReplayDetected";
    case Errc::BadReceiverTag: return "BadReceiverTag";
    case Errc::BindFailure: return "BindFailure";
    case Errc::ProfileConfigError: return "ProfileConfigError";
    case Errc::HandshakeFailed: return "HandshakeFailed";
    case Errc::Timeout: return "Timeout";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::NotConnected: return "NotConnected";
    case Errc::DuplicateSubscription: return "DuplicateSubscription";
    case Errc::PeerUnavailable: return "PeerUnavailable";
    case Errc::ResultTimeout: return "ResultTimeout";
    case Errc::ZeroElapsed: return "ZeroElapsed";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingBaseline: return "MissingBaseline";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace sentrybus
