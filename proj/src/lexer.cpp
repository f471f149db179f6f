#include <cctype>
#include <map>
#include <string>

#include "residua/token.hpp"

namespace residua {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::RealLit: return "real literal";
    case Tok::CharLit: return "character literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Assign: return "'='";
    case Tok::Slash: return "'/'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::StarStar: return "'**'";
    case Tok::OpEq: return "'.EQ.'";
    case Tok::OpNe: return "'.NE.'";
    case Tok::OpLt: return "'.LT.'";
    case Tok::OpLe: return "'.LE.'";
    case Tok::OpGt: return "'.GT.'";
    case Tok::OpGe: return "'.GE.'";
    case Tok::OpAnd: return "'.AND.'";
    case Tok::OpOr: return "'.OR.'";
    case Tok::OpNot: return "'.NOT.'";
    case Tok::LogicalTrue: return "'.TRUE.'";
    case Tok::LogicalFalse: return "'.FALSE.'";
    case Tok::Newline: return "end of line";
    case Tok::Eof: return "end of file";
    default: return "keyword";
  }
}

namespace {

const std::map<std::string, Tok>& keyword_map() {
  static const std::map<std::string, Tok> kws = {
      {"PROGRAM", Tok::KwProgram},   {"SUBROUTINE", Tok::KwSubroutine},
      {"FUNCTION", Tok::KwFunction}, {"END", Tok::KwEnd},
      {"IF", Tok::KwIf},             {"THEN", Tok::KwThen},
      {"ELSE", Tok::KwElse},         {"ENDIF", Tok::KwEndif},
      {"DO", Tok::KwDo},             {"WHILE", Tok::KwWhile},
      {"ENDDO", Tok::KwEnddo},       {"CALL", Tok::KwCall},
      {"RETURN", Tok::KwReturn},     {"STOP", Tok::KwStop},
      {"CONTINUE", Tok::KwContinue}, {"PRINT", Tok::KwPrint},
      {"READ", Tok::KwRead},         {"INTEGER", Tok::KwInteger},
      {"REAL", Tok::KwReal},         {"LOGICAL", Tok::KwLogical},
      {"CHARACTER", Tok::KwCharacter}, {"PARAMETER", Tok::KwParameter},
      {"COMMON", Tok::KwCommon},
  };
  return kws;
}

const std::map<std::string, Tok>& dot_op_map() {
  static const std::map<std::string, Tok> ops = {
      {"EQ", Tok::OpEq},   {"NE", Tok::OpNe},   {"LT", Tok::OpLt},
      {"LE", Tok::OpLe},   {"GT", Tok::OpGt},   {"GE", Tok::OpGe},
      {"AND", Tok::OpAnd}, {"OR", Tok::OpOr},   {"NOT", Tok::OpNot},
      {"TRUE", Tok::LogicalTrue}, {"FALSE", Tok::LogicalFalse},
  };
  return ops;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class Lexer {
 public:
  Lexer(const std::string& src, std::string filename)
      : src_(src), file_(std::move(filename)) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) lex_line();
    Token eof;
    eof.kind = Tok::Eof;
    eof.line = line_;
    eof.col = 1;
    attach_comments(eof);
    out_.push_back(eof);
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw CompileError(ErrorKind::LexError, {file_, line, col}, msg);
  }

  void attach_comments(Token& t) {
    if (!pending_comments_.empty()) {
      t.comments = std::move(pending_comments_);
      pending_comments_.clear();
    }
  }

  // A line is a comment when column 1 holds '*' or '!', or 'C'/'c'
  // followed by blank/EOL -- unless what follows starts with '=' or '(',
  // which can only be an assignment to a variable named C.
  bool is_comment_line(size_t start, size_t end) const {
    if (start >= end) return false;
    char c0 = src_[start];
    if (c0 == '*' || c0 == '!') return true;
    if (c0 == 'C' || c0 == 'c') {
      if (start + 1 >= end) return true;
      char c1 = src_[start + 1];
      if (c1 != ' ' && c1 != '\t') return false;
      size_t p = start + 1;
      while (p < end && (src_[p] == ' ' || src_[p] == '\t')) ++p;
      if (p < end && (src_[p] == '=' || src_[p] == '(')) return false;
      return true;
    }
    return false;
  }

  static std::string comment_text(const std::string& line) {
    size_t p = 0;
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
    if (p < line.size()) ++p;  // the marker itself
    if (p < line.size() && line[p] == ' ') ++p;
    std::string t = line.substr(p);
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.pop_back();
    return t;
  }

  void lex_line() {
    size_t line_start = pos_;
    size_t line_end = src_.find('\n', pos_);
    if (line_end == std::string::npos) line_end = src_.size();
    size_t content_end = line_end;
    while (content_end > line_start && src_[content_end - 1] == '\r') --content_end;

    if (is_comment_line(line_start, content_end)) {
      pending_comments_.push_back(
          comment_text(src_.substr(line_start, content_end - line_start)));
      advance_line(line_end);
      return;
    }

    bool emitted = false;
    pos_ = line_start;
    while (pos_ < content_end) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t') {
        ++pos_;
        continue;
      }
      if (c == '!') break;  // trailing comment: floats to the next statement
      lex_token(content_end);
      emitted = true;
    }
    if (pos_ < content_end && src_[pos_] == '!') {
      pending_comments_.push_back(
          comment_text(src_.substr(pos_, content_end - pos_)));
    }
    if (emitted) {
      Token nl;
      nl.kind = Tok::Newline;
      nl.line = line_;
      nl.col = static_cast<int>(content_end - line_start) + 1;
      out_.push_back(nl);
    }
    advance_line(line_end);
  }

  void advance_line(size_t line_end) {
    pos_ = line_end < src_.size() ? line_end + 1 : src_.size();
    ++line_;
  }

  int col_of(size_t p, size_t line_begin) const {
    return static_cast<int>(p - line_begin) + 1;
  }

  void push(Token t) {
    attach_comments(t);
    out_.push_back(std::move(t));
  }

  // True when src_[p] starts ".NAME." for a known dot-operator.
  bool dot_op_at(size_t p, size_t end, std::string* name) const {
    if (p >= end || src_[p] != '.') return false;
    size_t q = p + 1;
    std::string word;
    while (q < end && std::isalpha(static_cast<unsigned char>(src_[q]))) {
      word += static_cast<char>(std::toupper(static_cast<unsigned char>(src_[q])));
      ++q;
    }
    if (word.empty() || q >= end || src_[q] != '.') return false;
    if (!dot_op_map().count(word)) return false;
    *name = word;
    return true;
  }

  void lex_token(size_t end) {
    size_t line_begin = pos_;
    // recompute the start of this line for column numbers
    while (line_begin > 0 && src_[line_begin - 1] != '\n') --line_begin;
    size_t start = pos_;
    int col = col_of(start, line_begin);
    char c = src_[pos_];

    auto simple = [&](Tok k, int len) {
      Token t;
      t.kind = k;
      t.text = src_.substr(start, len);
      t.line = line_;
      t.col = col;
      pos_ += len;
      push(std::move(t));
    };

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < end && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number(end, line_begin);
      return;
    }
    if (c == '.') {
      std::string name;
      if (dot_op_at(pos_, end, &name)) {
        Token t;
        t.kind = dot_op_map().at(name);
        t.text = "." + name + ".";
        t.line = line_;
        t.col = col;
        pos_ += name.size() + 2;
        push(std::move(t));
        return;
      }
      fail(line_, col, "unexpected '.'");
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t q = pos_;
      while (q < end && (std::isalnum(static_cast<unsigned char>(src_[q])) || src_[q] == '_')) ++q;
      Token t;
      t.text = upper(src_.substr(start, q - start));
      auto it = keyword_map().find(t.text);
      t.kind = it != keyword_map().end() ? it->second : Tok::Ident;
      t.line = line_;
      t.col = col;
      pos_ = q;
      push(std::move(t));
      return;
    }
    switch (c) {
      case '(': simple(Tok::LParen, 1); return;
      case ')': simple(Tok::RParen, 1); return;
      case ',': simple(Tok::Comma, 1); return;
      case '=': simple(Tok::Assign, 1); return;
      case '/': simple(Tok::Slash, 1); return;
      case '+': simple(Tok::Plus, 1); return;
      case '-': simple(Tok::Minus, 1); return;
      case '*':
        if (pos_ + 1 < end && src_[pos_ + 1] == '*') simple(Tok::StarStar, 2);
        else simple(Tok::Star, 1);
        return;
      case '\'': lex_char_literal(end, col); return;
      default:
        fail(line_, col, std::string("illegal character '") + c + "'");
    }
  }

  void lex_char_literal(size_t end, int col) {
    size_t q = pos_ + 1;
    std::string text;
    while (true) {
      if (q >= end) fail(line_, col, "unterminated character literal");
      if (src_[q] == '\'') {
        if (q + 1 < end && src_[q + 1] == '\'') {
          text += '\'';
          q += 2;
          continue;
        }
        ++q;
        break;
      }
      text += src_[q];
      ++q;
    }
    Token t;
    t.kind = Tok::CharLit;
    t.str_val = std::move(text);
    t.text = src_.substr(pos_, q - pos_);
    t.line = line_;
    t.col = col;
    pos_ = q;
    push(std::move(t));
  }

  void lex_number(size_t end, size_t line_begin) {
    size_t start = pos_;
    int col = col_of(start, line_begin);
    size_t q = pos_;
    bool is_real = false;
    while (q < end && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
    // "1.EQ.2" lexes the dot as an operator, not a decimal point
    std::string opname;
    if (q < end && src_[q] == '.' && !dot_op_at(q, end, &opname)) {
      is_real = true;
      ++q;
      while (q < end && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
    }
    if (q < end && (src_[q] == 'e' || src_[q] == 'E')) {
      size_t e = q + 1;
      if (e < end && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < end && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        is_real = true;
        q = e;
        while (q < end && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
      }
    }
    std::string text = src_.substr(start, q - start);
    Token t;
    t.line = line_;
    t.col = col;
    t.text = text;
    if (is_real) {
      t.kind = Tok::RealLit;
      try {
        t.real_val = std::stod(text);
      } catch (const std::exception&) {
        fail(line_, col, "malformed real literal '" + text + "'");
      }
    } else {
      t.kind = Tok::IntLit;
      try {
        t.int_val = std::stoll(text);
      } catch (const std::exception&) {
        fail(line_, col, "integer literal out of range '" + text + "'");
      }
    }
    pos_ = q;
    push(std::move(t));
  }

  const std::string& src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  std::vector<Token> out_;
  std::vector<std::string> pending_comments_;
};

}  // namespace

std::vector<Token> tokenize(const std::string& source, const std::string& filename) {
  return Lexer(source, filename).run();
}

}  // namespace residua
