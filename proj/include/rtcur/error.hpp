#pragma once

#include <stdexcept>
#include <string>

namespace rtcur {

// Base of every error thrown by the library. kind() is a short stable tag
// used by the command-line front end for machine-parseable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ModeError : public Error {
 public:
  explicit ModeError(const std::string& m) : Error("mode", m) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& m) : Error("index", m) {}
};

class RankError : public Error {
 public:
  explicit RankError(const std::string& m) : Error("rank", m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& m) : Error("input", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io", m) {}
};

class ConversionError : public Error {
 public:
  explicit ConversionError(const std::string& m) : Error("conversion", m) {}
};

}  // namespace rtcur
