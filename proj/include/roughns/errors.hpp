#pragma once

#include <stdexcept>
#include <string>

namespace roughns {

// Error taxonomy used across the library. The CLI maps NumericError-derived
// failures to exit code 1 and ConfigError/IoError to exit code 2.

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGrid : Error {
  explicit InvalidGrid(const std::string& msg) : Error("InvalidGrid: " + msg) {}
};

struct UnsupportedHurst : Error {
  explicit UnsupportedHurst(const std::string& msg) : Error("UnsupportedHurst: " + msg) {}
};

struct MeshTooFine : Error {
  explicit MeshTooFine(const std::string& msg) : Error("MeshTooFine: " + msg) {}
};

struct NotSewable : Error {
  explicit NotSewable(const std::string& msg) : Error("NotSewable: " + msg) {}
};

struct EmptyBasis : Error {
  explicit EmptyBasis(const std::string& msg) : Error("EmptyBasis: " + msg) {}
};

struct ChannelMismatch : Error {
  explicit ChannelMismatch(const std::string& msg) : Error("ChannelMismatch: " + msg) {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& msg) : Error("GridMismatch: " + msg) {}
};

struct BasisMismatch : Error {
  explicit BasisMismatch(const std::string& msg) : Error("BasisMismatch: " + msg) {}
};

struct DriverMismatch : Error {
  explicit DriverMismatch(const std::string& msg) : Error("DriverMismatch: " + msg) {}
};

struct OracleUnavailable : Error {
  explicit OracleUnavailable(const std::string& msg) : Error("OracleUnavailable: " + msg) {}
};

struct NumericalBlowup : Error {
  NumericalBlowup(double time, double norm)
      : Error("NumericalBlowup: |c| = " + std::to_string(norm) + " at t = " + std::to_string(time)),
        time(time),
        norm(norm) {}
  double time;
  double norm;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& field, const std::string& msg)
      : Error("ConfigError [" + field + "]: " + msg), field(field) {}
  std::string field;
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("IoError: " + msg) {}
};

}  // namespace roughns
