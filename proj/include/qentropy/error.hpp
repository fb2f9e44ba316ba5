#pragma once

#include <stdexcept>
#include <string>

namespace qentropy {

enum class ErrorKind {
  NotHermitian,
  NotConverged,
  Domain,
  ShapeMismatch,
  InvalidArgument,
  NotPositive,
  TraceMismatch,
  SupportViolation,
  RankDeficient,
  DegenerateOverlap,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "hermiticity";
    case ErrorKind::NotConverged: return "convergence";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::ShapeMismatch: return "shape";
    case ErrorKind::InvalidArgument: return "argument";
    case ErrorKind::NotPositive: return "positivity";
    case ErrorKind::TraceMismatch: return "trace";
    case ErrorKind::SupportViolation: return "support";
    case ErrorKind::RankDeficient: return "rank";
    case ErrorKind::DegenerateOverlap: return "overlap";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

/// Every failure in the library is reported through this type. `defect()` carries the
/// measured size of the violation when one exists (0 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double defect = 0.0)
      : std::runtime_error(what), kind_(kind), defect_(defect) {}

  ErrorKind kind() const noexcept { return kind_; }
  double defect() const noexcept { return defect_; }

 private:
  ErrorKind kind_;
  double defect_;
};

}  // namespace qentropy
