#pragma once

#include <stdexcept>
#include <string>

#include "qlc/syntax/term.hpp"

namespace qlc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(SourceLoc loc, const std::string& msg)
      : Error(std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + msg), loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class TypeError : public Error {
 public:
  TypeError(SourceLoc loc, const std::string& msg)
      : Error(loc.line ? std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + msg : msg),
        loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Raised when reduction gets stuck or a step budget runs out.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Raised by the denotational layer for ill-formed IR or residual objects.
class DenotError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlc
