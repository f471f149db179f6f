#pragma once

#include <stdexcept>
#include <string>

namespace residua {

struct SourcePos {
  std::string file;
  int line = 0;
  int col = 0;

  std::string str() const;
};

enum class ErrorKind {
  LexError,
  ParseError,
  DuplicateUnit,
  MissingMain,
  DuplicateDeclaration,
  CommonLayoutMismatch,
  UndeclaredVariable,
  ParameterRedefinition,
  TypeMismatch,
  ConstraintParseError,
  ConflictingConstraint,
  UnknownConstrainedName,
  ConstraintTypeMismatch,
  UnresolvedCallee,
  ArityMismatch,
  ArgumentTypeMismatch,
  RecursionDepthExceeded,
  InputError,
  InternalError,
};

const char* error_kind_name(ErrorKind k);

/// User-facing error with a source position; the CLI prints these as
/// "file:line:col: kind: message" on stderr and exits with code 2.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrorKind kind, SourcePos pos, const std::string& message);
  CompileError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }
  const SourcePos& pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  static std::string render(ErrorKind kind, const SourcePos& pos,
                            const std::string& message);
  ErrorKind kind_;
  SourcePos pos_;
  std::string message_;
};

}  // namespace residua
