#pragma once

#include <stdexcept>
#include <string>

namespace sptopics {

// Error categories; the CLI maps these onto exit codes and a JSON report.
enum class ErrorKind {
  Format,           // unparseable input file
  Data,             // negative, non-finite or missing values
  EmptyDocument,    // document row with no positive entry
  Shape,            // dimension mismatch
  Config,           // invalid parameter or parameter combination
  Degenerate,       // zero matrix / zero iterate where a nonzero is required
  NoComponent,      // every solver restart was degenerate
  DegenerateTopic,  // interference column with no two-cluster separation
  Size,             // combinatorial guard exceeded
  Io,               // file missing or unwritable
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sptopics
