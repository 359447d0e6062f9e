#include "cortexenc/error.hpp"

namespace cortexenc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::decode: return "decode";
    case ErrorKind::schema: return "schema";
    case ErrorKind::io: return "io";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::mismatch: return "mismatch";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> byte_offset)
    : std::runtime_error(message), kind_(kind), byte_offset_(byte_offset) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace cortexenc
