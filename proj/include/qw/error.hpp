#pragma once

#include <stdexcept>
#include <string>

namespace qw {

enum class ErrorKind {
  DisconnectedGraph,
  InvalidEdge,
  DuplicateEdge,
  UnknownBoundaryVertex,
  ZeroTailCount,
  NotBoundaryVertex,
  ParamOutOfRange,
  BadBlockSizes,
  DepthTooSmall,
  SingularResolventNearContour,
  NotAResonance,
  NoConvergence,
  ClassificationMismatch,
  GroupEscapedContour,
  Stage1NotSemisimple,
  OutOfRange,
  Config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Config-type errors map to CLI exit code 2, the rest to 3.
bool is_config_error(ErrorKind k);

}  // namespace qw
