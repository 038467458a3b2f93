#pragma once

#include <stdexcept>
#include <string>

namespace ssrn {

// Every failure raised by the library derives from Error; `kind()` is the
// stable machine-readable tag the CLI prints.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error("shape", w) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& w) : Error("index", w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error("validation", w) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error("contract", w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error("format", w) {}
};
struct LengthError : Error {
  explicit LengthError(const std::string& w) : Error("length", w) {}
};
struct IntegrityError : Error {
  explicit IntegrityError(const std::string& w) : Error("integrity", w) {}
};
struct VersionError : Error {
  explicit VersionError(const std::string& w) : Error("version", w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error("io", w) {}
};

}  // namespace ssrn
