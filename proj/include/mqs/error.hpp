#pragma once

#include <stdexcept>
#include <string>

namespace mqs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class TruncationError : public Error { using Error::Error; };
class NotPositiveSemidefinite : public Error { using Error::Error; };
class FilterAnnihilated : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

}  // namespace mqs
