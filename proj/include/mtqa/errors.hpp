#pragma once

#include <stdexcept>
#include <string>

namespace mtqa {

// Text-format errors carry the offending file (or "<string>") and line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& source, int line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    int line() const { return line_; }

  private:
    int line_;
};

// Problem exceeds an exhaustive-enumerator or dense-solver size cap.
class CapacityError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace mtqa
