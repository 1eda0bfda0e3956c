#ifndef RISSIM_ERRORS_HPP
#define RISSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rissim {

/// Base for all library errors. code() is a stable machine-readable tag
/// (printed by the CLI as `ERROR <code>: ...`).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error("ParseError", msg) {}
};

/// Scene invariant violation; field() is the offending path, e.g.
/// `receivers[A].position`.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& msg)
      : Error("ValidationError", field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class AngleNotAllowed : public Error {
 public:
  explicit AngleNotAllowed(double angle)
      : Error("AngleNotAllowed", "RIS angle " + format_angle(angle) + " is not in allowed_angles"),
        angle_(angle) {}
  double angle() const noexcept { return angle_; }

 private:
  static std::string format_angle(double a) {
    std::string s = std::to_string(a);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
  double angle_;
};

class DegeneratePath : public Error {
 public:
  explicit DegeneratePath(const std::string& msg) : Error("DegeneratePath", msg) {}
};

class GridTooLarge : public Error {
 public:
  explicit GridTooLarge(const std::string& msg) : Error("GridTooLarge", msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error("InvalidArgument", msg) {}
};

class UnknownReceiver : public Error {
 public:
  explicit UnknownReceiver(const std::string& name)
      : Error("UnknownReceiver", "no receiver named '" + name + "' in trace") {}
};

class ReceiverSetMismatch : public Error {
 public:
  explicit ReceiverSetMismatch(const std::string& msg) : Error("ReceiverSetMismatch", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("IoError", msg) {}
};

}  // namespace rissim

#endif  // RISSIM_ERRORS_HPP
