//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_ERROR_HPP_
#define IPBIND_CORE_ERROR_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipbind {

// Values double as CLI exit codes and C API status codes.
enum class ErrorKind : int {
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) { }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string &what)
      : Error(ErrorKind::kUsage, what) { }
};

class DataError : public Error {
public:
  explicit DataError(const std::string &what)
      : Error(ErrorKind::kData, what) { }
};

class NumericalError : public Error {
public:
  explicit NumericalError(const std::string &what)
      : Error(ErrorKind::kNumerical, what) { }
};

using WarningHandler = std::function<void(std::string_view)>;

// Installs a process-wide sink for warnings (default: stderr). Passing an
// empty handler silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

} // namespace ipbind

#endif // IPBIND_CORE_ERROR_HPP_
