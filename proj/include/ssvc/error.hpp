#pragma once

#include <stdexcept>
#include <string>

namespace ssvc {

// Error categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  io,          // file could not be read or written
  format,      // bad magic, version, unregistered enum, malformed text input
  structural,  // inconsistent chunk table or header fields
  truncation,  // input ended before a complete header
  checksum,    // chunk checksum mismatch
  capacity,    // value does not fit a fixed-width field
  dimension,   // frame / latent shape mismatch
  layout,      // symbol count does not match a region layout
  not_found,   // requested chunk, object or frame is absent
  argument,    // precondition violated by the caller
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a header is cut short; carries how many bytes would be needed.
class TruncationError : public Error {
 public:
  TruncationError(std::size_t needed, std::size_t available)
      : Error(ErrorKind::truncation,
              "truncated input: need " + std::to_string(needed) +
                  " bytes, have " + std::to_string(available)),
        needed_(needed),
        available_(available) {}

  std::size_t needed() const { return needed_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t needed_;
  std::size_t available_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ssvc
