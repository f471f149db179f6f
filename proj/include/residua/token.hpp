#pragma once

#include <string>
#include <vector>

#include "residua/diag.hpp"
#include "residua/value.hpp"

namespace residua {

enum class Tok {
  Ident,
  IntLit,
  RealLit,
  CharLit,
  LParen,
  RParen,
  Comma,
  Assign,  // '='
  Slash,   // '/': division and COMMON /B/ delimiters
  Plus,
  Minus,
  Star,
  StarStar,
  OpEq,
  OpNe,
  OpLt,
  OpLe,
  OpGt,
  OpGe,
  OpAnd,
  OpOr,
  OpNot,
  LogicalTrue,
  LogicalFalse,
  KwProgram,
  KwSubroutine,
  KwFunction,
  KwEnd,
  KwIf,
  KwThen,
  KwElse,
  KwEndif,
  KwDo,
  KwWhile,
  KwEnddo,
  KwCall,
  KwReturn,
  KwStop,
  KwContinue,
  KwPrint,
  KwRead,
  KwInteger,
  KwReal,
  KwLogical,
  KwCharacter,
  KwParameter,
  KwCommon,
  Newline,
  Eof,
};

const char* tok_name(Tok t);

struct Token {
  Tok kind = Tok::Eof;
  std::string text;          // uppercased for identifiers and keywords
  long long int_val = 0;     // IntLit
  double real_val = 0.0;     // RealLit
  std::string str_val;       // CharLit contents (unescaped)
  int line = 0;
  int col = 0;
  // Comment lines collected immediately above; carried by the first
  // token of the statement they precede.
  std::vector<std::string> comments;
};

/// Splits a source file into tokens. Statement separators show up as
/// Newline tokens (blank lines collapse); keywords are case-insensitive;
/// comment lines attach to the first token of the following statement.
/// Throws CompileError(LexError) with position on malformed input.
std::vector<Token> tokenize(const std::string& source, const std::string& filename);

}  // namespace residua
