#include "share/error.hpp"

namespace share {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kNumerical:
      return "numerical";
  }
  return "unknown";
}

}  // namespace share
