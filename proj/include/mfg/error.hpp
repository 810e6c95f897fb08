#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define MFG_ERROR_KIND(Name, tag)                                     \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(what) {}           \
    const char* kind() const noexcept override { return tag; }        \
  };

MFG_ERROR_KIND(ConfigError, "config")
MFG_ERROR_KIND(NumericError, "numeric")
MFG_ERROR_KIND(SchemeError, "scheme")
MFG_ERROR_KIND(DegenerateError, "degenerate")
MFG_ERROR_KIND(UnderResolvedError, "under_resolved")
MFG_ERROR_KIND(DomainMisuseError, "domain_misuse")
MFG_ERROR_KIND(UnsupportedError, "unsupported")
MFG_ERROR_KIND(FormatError, "format")
MFG_ERROR_KIND(FitError, "fit")

#undef MFG_ERROR_KIND

// Non-convergence; keeps the residual history of the failed iteration.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const char* kind() const noexcept override { return "diverged"; }
  const std::vector<double>& history() const { return history_; }
  double last_residual() const { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

// Sweep failure at a given mass index.
class SweepError : public Error {
 public:
  SweepError(const std::string& what, std::size_t index, std::string inner_kind)
      : Error(what), index_(index), inner_kind_(std::move(inner_kind)) {}
  const char* kind() const noexcept override { return inner_kind_.c_str(); }
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
  std::string inner_kind_;
};

}  // namespace mfg
