#include "maketex/error.hpp"

namespace maketex {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingUVs: return "MissingUVs";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::InvalidCount: return "InvalidCount";
    case Errc::ResolutionMismatch: return "ResolutionMismatch";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::EmptyForeground: return "EmptyForeground";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::InvalidBatch: return "InvalidBatch";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::Timeout: return "Timeout";
    case Errc::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

bool is_generator_error(Errc code) {
  return code == Errc::BackendUnavailable || code == Errc::Timeout || code == Errc::ProtocolError;
}

}  // namespace maketex
