#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maketex {

enum class Errc {
  InvalidArgument,
  Io,
  ParseError,
  MissingUVs,
  EmptyMesh,
  InvalidCount,
  ResolutionMismatch,
  EmptyCandidates,
  EmptyForeground,
  SizeMismatch,
  InvalidBatch,
  BackendUnavailable,
  Timeout,
  ProtocolError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

// True for failures that originate in the image generator backend.
bool is_generator_error(Errc code);

}  // namespace maketex
