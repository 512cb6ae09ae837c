#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hotrack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// topology construction
struct IndexOutOfRange : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct NonPositiveWeight : Error { using Error::Error; };
struct DuplicateEdge : Error { using Error::Error; };

// numeric inputs
struct NonFiniteInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// leader input of table kind queried outside its knot range
struct OutOfHorizon : Error { using Error::Error; };

// polynomial / Lyapunov machinery
struct DegenerateDegree : Error { using Error::Error; };
struct NotHurwitz : Error { using Error::Error; };

// simulation
struct NonFiniteState : Error { using Error::Error; };
struct EmptyLog : Error { using Error::Error; };

struct Diverged : Error {
  double t;
  Diverged(double t_, const std::string& what) : Error(what), t(t_) {}
};

struct StepTooLarge : Error {
  double t;
  StepTooLarge(double t_, const std::string& what) : Error(what), t(t_) {}
};

// scenario files
struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& message)
      : Error("parse error at line " + std::to_string(line_) + ": " + message),
        line(line_) {}
};

// carries every violation found, not just the first
struct ValidationError : Error {
  std::vector<std::string> issues;
  explicit ValidationError(std::vector<std::string> issues_)
      : Error(join(issues_)), issues(std::move(issues_)) {}

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "scenario validation failed:";
    for (const auto& i : v) {
      s += "\n  - ";
      s += i;
    }
    return s;
  }
};

}  // namespace hotrack
