#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cortexenc {

enum class ErrorKind {
  invalid_argument,  // violated precondition
  decode,            // malformed input bytes (UTF-8, binary magic, numbers)
  schema,            // missing/unknown columns or keys
  io,                // file system failure
  numeric,           // singular system, non-finite values
  empty_input,       // empty corpus, empty graph, zero coverage
  mismatch,          // inconsistent shapes, subjects, models or targets
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> byte_offset = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  // Set for decode errors that can be pinned to a byte position.
  std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> byte_offset_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace cortexenc
