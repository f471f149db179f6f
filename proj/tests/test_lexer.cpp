#include <doctest.h>

#include <cstdint>

#include "residua/token.hpp"

using namespace residua;

namespace {
std::vector<Tok> kinds(const std::string& src) {
  std::vector<Tok> out;
  for (const auto& t : tokenize(src, "t.f")) out.push_back(t.kind);
  return out;
}
}  // namespace

TEST_CASE("minimal assignment tokens") {
  auto toks = tokenize("X = 1", "t.f");
  REQUIRE(toks.size() == 5);  // X = 1 <newline> <eof>
  CHECK(toks[0].kind == Tok::Ident);
  CHECK(toks[0].text == "X");
  CHECK(toks[1].kind == Tok::Assign);
  CHECK(toks[2].kind == Tok::IntLit);
  CHECK(toks[2].int_val == 1);
  CHECK(toks[3].kind == Tok::Newline);
  CHECK(toks[4].kind == Tok::Eof);
}

TEST_CASE("keywords are case-insensitive") {
  auto toks = tokenize("if (A .eq. 2) Then", "t.f");
  CHECK(toks[0].kind == Tok::KwIf);
  CHECK(toks[1].kind == Tok::LParen);
  CHECK(toks[2].kind == Tok::Ident);
  CHECK(toks[2].text == "A");
  CHECK(toks[3].kind == Tok::OpEq);
  CHECK(toks[4].kind == Tok::IntLit);
  CHECK(toks[5].kind == Tok::RParen);
  CHECK(toks[6].kind == Tok::KwThen);
}

TEST_CASE("real literals including exponent forms") {
  auto toks = tokenize("X = 1.0E-6", "t.f");
  CHECK(toks[2].kind == Tok::RealLit);
  CHECK(toks[2].real_val == 1.0e-6);

  toks = tokenize("Y = 3.14159", "t.f");
  CHECK(toks[2].kind == Tok::RealLit);
  CHECK(toks[2].real_val == 3.14159);

  toks = tokenize("Z = 2E3", "t.f");
  CHECK(toks[2].kind == Tok::RealLit);
  CHECK(toks[2].real_val == 2000.0);
}

TEST_CASE("dot operators win over decimal points") {
  // 1.EQ.2 must lex as IntLit OpEq IntLit, not a malformed real
  auto ks = kinds("X = 1.EQ.2");
  REQUIRE(ks.size() >= 5);
  CHECK(ks[2] == Tok::IntLit);
  CHECK(ks[3] == Tok::OpEq);
  CHECK(ks[4] == Tok::IntLit);

  ks = kinds("X = 1.5");
  CHECK(ks[2] == Tok::RealLit);
}

TEST_CASE("comment lines attach to the following statement") {
  auto toks = tokenize("C heading comment\n* another\nX = 1\n", "t.f");
  REQUIRE(toks[0].kind == Tok::Ident);
  REQUIRE(toks[0].comments.size() == 2);
  CHECK(toks[0].comments[0] == "heading comment");
  CHECK(toks[0].comments[1] == "another");
}

TEST_CASE("column-1 C assignment disambiguation") {
  // "C = 1" assigns to variable C; "C note" is a comment
  auto toks = tokenize("C = 1", "t.f");
  CHECK(toks[0].kind == Tok::Ident);
  CHECK(toks[0].text == "C");
  toks = tokenize("C note\nX = 1", "t.f");
  CHECK(toks[0].kind == Tok::Ident);
  CHECK(toks[0].text == "X");
  REQUIRE(toks[0].comments.size() == 1);
}

TEST_CASE("lex errors carry position") {
  try {
    tokenize("X = @", "t.f");
    FAIL("expected LexError");
  } catch (const CompileError& e) {
    CHECK(e.kind() == ErrorKind::LexError);
    CHECK(e.pos().line == 1);
    CHECK(e.pos().col == 5);
  }
  CHECK_THROWS_AS(tokenize("S = 'unterminated", "t.f"), CompileError);
}

TEST_CASE("tokenizer totality on arbitrary bytes") {
  // every byte sequence either tokenizes or raises LexError; no crashes
  std::uint64_t state = 42;
  auto next = [&] {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 33;
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    int len = static_cast<int>(next() % 40);
    for (int i = 0; i < len; ++i) s += static_cast<char>(next() % 256);
    try {
      auto toks = tokenize(s, "fuzz");
      CHECK(!toks.empty());
      CHECK(toks.back().kind == Tok::Eof);
    } catch (const CompileError& e) {
      CHECK(e.kind() == ErrorKind::LexError);
      CHECK(e.pos().line >= 1);
    }
  }
}

TEST_CASE("trailing bang comments float to the next statement") {
  auto toks = tokenize("X = 1 ! set it\nY = 2\n", "t.f");
  size_t yi = 0;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind == Tok::Ident && toks[i].text == "Y") yi = i;
  }
  REQUIRE(yi > 0);
  REQUIRE(toks[yi].comments.size() == 1);
  CHECK(toks[yi].comments[0] == "set it");
}
