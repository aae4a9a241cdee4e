#include "mlmod/errors.hpp"

namespace mlmod {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

}  // namespace mlmod
