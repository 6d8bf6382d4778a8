#ifndef SESN_ERRORS_HPP
#define SESN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace sesn {

/// Error with a machine-parsable kind tag. The CLI prints these as
/// "error:<kind>: <message>" on a single line and exits nonzero.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline Error invalid_data_error(const std::string& m) { return Error("invalid-data", m); }
inline Error domain_error(const std::string& m) { return Error("domain", m); }
inline Error schema_error(const std::string& m) { return Error("schema", m); }
inline Error singular_design_error(const std::string& m) { return Error("singular-design", m); }
inline Error insufficient_history_error(const std::string& m) { return Error("insufficient-history", m); }
inline Error insufficient_data_error(const std::string& m) { return Error("insufficient-data", m); }
inline Error configuration_error(const std::string& m) { return Error("configuration", m); }
inline Error numeric_error(const std::string& m) { return Error("numeric", m); }
inline Error io_error(const std::string& m) { return Error("io", m); }
inline Error integration_failure_error(const std::string& m) { return Error("integration-failure", m); }
inline Error fit_failure_error(const std::string& m) { return Error("fit-failure", m); }

}  // namespace sesn

#endif  // SESN_ERRORS_HPP
