#include "residua/diag.hpp"

namespace residua {

std::string SourcePos::str() const {
  if (file.empty() && line == 0) return "<unknown>";
  return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::LexError: return "LexError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateUnit: return "DuplicateUnit";
    case ErrorKind::MissingMain: return "MissingMain";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::CommonLayoutMismatch: return "CommonLayoutMismatch";
    case ErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case ErrorKind::ParameterRedefinition: return "ParameterRedefinition";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::ConstraintParseError: return "ConstraintParseError";
    case ErrorKind::ConflictingConstraint: return "ConflictingConstraint";
    case ErrorKind::UnknownConstrainedName: return "UnknownConstrainedName";
    case ErrorKind::ConstraintTypeMismatch: return "ConstraintTypeMismatch";
    case ErrorKind::UnresolvedCallee: return "UnresolvedCallee";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::ArgumentTypeMismatch: return "ArgumentTypeMismatch";
    case ErrorKind::RecursionDepthExceeded: return "RecursionDepthExceeded";
    case ErrorKind::InputError: return "InputError";
    case ErrorKind::InternalError: return "InternalError";
  }
  return "Error";
}

std::string CompileError::render(ErrorKind kind, const SourcePos& pos,
                                 const std::string& message) {
  std::string out;
  if (!pos.file.empty() || pos.line > 0) out += pos.str() + ": ";
  out += std::string(error_kind_name(kind)) + ": " + message;
  return out;
}

CompileError::CompileError(ErrorKind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(render(kind, pos, message)),
      kind_(kind),
      pos_(std::move(pos)),
      message_(message) {}

CompileError::CompileError(ErrorKind kind, const std::string& message)
    : CompileError(kind, SourcePos{}, message) {}

}  // namespace residua
