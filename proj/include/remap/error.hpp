#ifndef REMAP_ERROR_HPP_
#define REMAP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace remap {

enum class Errc {
  Syntax,
  ArchMismatch,
  UnresolvedLabel,
  UniverseMismatch,
  FenceHasNoLocation,
  MissingMo,
  LoopDetected,
  BudgetExceeded,
  NodeNotInCfg,
  NotAFence,
  PatternMismatch,
  MissingC11Annotation,
  UnmappableInstruction,
  UnsupportedPair,
  Usage,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// Parse failure with source position; line/col are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& msg)
      : Error(Errc::Syntax,
              "syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

}  // namespace remap

#endif  // REMAP_ERROR_HPP_
