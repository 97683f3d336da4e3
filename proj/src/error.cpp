#include "ssvc/error.hpp"

namespace ssvc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::structural: return "structural";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::checksum: return "checksum";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::layout: return "layout";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::argument: return "argument";
  }
  return "unknown";
}

}  // namespace ssvc
