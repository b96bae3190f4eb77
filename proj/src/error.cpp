#include "sptopics/error.hpp"

namespace sptopics {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Data: return "data";
    case ErrorKind::EmptyDocument: return "empty-document";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Config: return "config";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::NoComponent: return "no-component";
    case ErrorKind::DegenerateTopic: return "degenerate-topic";
    case ErrorKind::Size: return "size";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace sptopics
