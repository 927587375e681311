#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ral {

/// Base of every error the library raises for bad input or exceeded budgets.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A configured enumeration or atom budget would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace ral
