#pragma once

#include <stdexcept>
#include <string>

namespace airtime {

enum class ErrorCategory
{
  usage,
  validation,
  io,
  internal,
};

inline const char*
to_string(ErrorCategory c)
{
  switch (c)
  {
  case ErrorCategory::usage:
    return "usage";
  case ErrorCategory::validation:
    return "validation";
  case ErrorCategory::io:
    return "io";
  case ErrorCategory::internal:
    return "internal";
  }
  return "internal";
}

/// Process exit code for each category; 0 is reserved for success.
inline int
exit_code(ErrorCategory c)
{
  switch (c)
  {
  case ErrorCategory::usage:
    return 2;
  case ErrorCategory::validation:
    return 3;
  case ErrorCategory::io:
    return 4;
  case ErrorCategory::internal:
    return 1;
  }
  return 1;
}

class Error : public std::runtime_error
{
public:
  Error(ErrorCategory category, const std::string& what)
    : std::runtime_error(what)
    , category_(category)
  {
  }

  ErrorCategory category() const { return category_; }

private:
  ErrorCategory category_;
};

inline Error
validation_error(const std::string& what)
{
  return Error(ErrorCategory::validation, what);
}

} // namespace airtime
