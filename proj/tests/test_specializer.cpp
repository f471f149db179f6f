#include <doctest.h>

#include "residua/difftest.hpp"
#include "residua/pretty.hpp"
#include "residua/specialize.hpp"
#include "test_util.hpp"

using namespace residua;

namespace {

SpecializeResult specialize(const testutil::Compiled& c, const ConstraintSet& cs,
                            ReplacementPolicy policy = ReplacementPolicy::all()) {
  SpecializeConfig config;
  config.policy = std::move(policy);
  return specialize_program(c.program, c.symtab, cs, config);
}

ConstraintSet parse_cs(const std::string& text) {
  return parse_constraints(text, "t.pec");
}

std::string main_text(const SpecializeResult& r) {
  return unit_text(*r.residual.find_unit(r.residual.entry));
}

void check_equivalent(const testutil::Compiled& c, const SpecializeResult& r,
                      const ConstraintSet& cs, int trials = 100) {
  SymbolTable resid_symtab = resolve_symbols(r.residual);
  DiffConfig dc;
  dc.trials = trials;
  Verdict v = diff_test(c.program, c.symtab, r.residual, resid_symtab, r.report, cs, dc);
  if (!v.passed) {
    MESSAGE("diff mismatch: " << v.mismatch);
  }
  CHECK(v.passed);
}

}  // namespace

TEST_CASE("constant propagates through straight-line code and folds a branch") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER X, Y\nX = 5\nIF (X .GT. 3) THEN\nY = 1\nELSE\n"
      "Y = 2\nEND IF\nPRINT *, Y\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  CHECK(text.find("IF") == std::string::npos);
  CHECK(text.find("PRINT *, 1") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("dead branch removal under a MODE constraint records the right reasons") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER MODE, Y\nREAD *, MODE\nMODE = 2\n"
      "IF (MODE .EQ. 2) THEN\nY = 10\nELSE\nY = 20\nEND IF\nPRINT *, Y\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  CHECK(text.find("ELSE") == std::string::npos);
  CHECK(text.find("20") == std::string::npos);
  // the untaken arm is Removed(dead-branch); the IF header vanished
  const VariantRecord* v = r.report.find_variant("MAIN");
  REQUIRE(v);
  int dead = 0, flattened = 0;
  for (const auto& [prov, rec] : v->stmts) {
    if (rec.disposition == Disposition::Removed && rec.reason == "dead-branch") ++dead;
    if (rec.disposition == Disposition::Removed && rec.reason == "branch-flattened")
      ++flattened;
  }
  CHECK(dead == 1);
  CHECK(flattened == 1);
  check_equivalent(c, r, {});
}

TEST_CASE("condition facts: EQ binds in the then-arm, disequality prunes the else-arm") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER K, Y\nREAD *, K\n"
      "IF (K .EQ. 7) THEN\nY = K + 1\nELSE\n"
      "IF (K .NE. 7) THEN\nY = 2\nELSE\nY = 3\nEND IF\nEND IF\nPRINT *, Y\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  // then-arm: K+1 folds to 8 under the bound K=7
  CHECK(text.find("Y = 8") != std::string::npos);
  // else-arm: the inner IF folds via the fact K /= 7; Y = 3 is dead
  CHECK(text.find("Y = 3") == std::string::npos);
  CHECK(!r.report.facts_fired.empty());
  check_equivalent(c, r, {});
}

TEST_CASE("zero-trip DO removal sets the index to its first untaken value") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER I, N, X\nN = 0\nX = 0\nDO I = 1, N\nX = X + 1\nEND DO\n"
      "PRINT *, I, X\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  CHECK(text.find("DO") == std::string::npos);
  // env[I] = Known(1) after removal, so the PRINT folds
  CHECK(text.find("PRINT *, 1, 0") != std::string::npos);
  CHECK(r.report.removed_with_reason("zero-trip").size() == 1);
  check_equivalent(c, r, {});
}

TEST_CASE("loops with unknown bounds keep their structure and kill their MOD set") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER I, N, X\nREAD *, N\nX = 5\nDO I = 1, N\nX = X + I\n"
      "END DO\nPRINT *, X\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  CHECK(text.find("DO I = 1, N") != std::string::npos);
  // X was killed by the loop: the PRINT cannot fold
  CHECK(text.find("PRINT *, X") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("DO WHILE never entered is removed only when false before and inside") {
  // the body writes Y, not N, so the condition stays decided under the
  // body kill as well as at entry
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER N, Y\nN = 5\nY = 0\nDO WHILE (N .LT. 5)\nY = Y + 1\n"
      "END DO\nPRINT *, Y, N\nEND");
  auto r = specialize(c, {});
  CHECK(main_text(r).find("DO WHILE") == std::string::npos);
  CHECK(r.report.removed_with_reason("never-entered").size() == 2);
  check_equivalent(c, r, {});

  // here the condition is false at entry only under the body's kill,
  // not provably: the loop must stay
  auto c2 = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER X\nREAD *, X\nDO WHILE (X .LT. 5)\nX = X + 1\nEND DO\n"
      "PRINT *, X\nEND");
  auto r2 = specialize(c2, {});
  CHECK(main_text(r2).find("DO WHILE") != std::string::npos);
  check_equivalent(c2, r2, {});
}

TEST_CASE("neutral elements simplify; absorbers need a safe operand") {
  auto c = testutil::compile(
      {{"m.f",
        "PROGRAM MAIN\nINTEGER X, Y, K\nCOMMON /B/ K\nK = 0\nREAD *, X\n"
        "Y = X + 0\nPRINT *, Y\nY = Y * 1\nPRINT *, Y\nY = X * 0\nPRINT *, Y\n"
        "Y = F(X) * 0\nPRINT *, Y, K\nEND"},
       {"f.f", "INTEGER FUNCTION F(N)\nINTEGER N, K\nCOMMON /B/ K\nK = K + 1\n"
               "F = N\nRETURN\nEND"}});
  auto r = specialize(c, ConstraintSet{}, ReplacementPolicy::none());
  std::string text = main_text(r);
  CHECK(text.find("Y = X\n") != std::string::npos);   // X + 0 -> X
  CHECK(text.find("Y = Y\n") != std::string::npos);   // Y * 1 -> Y
  CHECK(text.find("Y = 0\n") != std::string::npos);   // X * 0 -> 0 (X is safe)
  CHECK(text.find("F(X) * 0") != std::string::npos);  // effectful: kept
  check_equivalent(c, r, {});
}

TEST_CASE("PI stays symbolic under the keep-list policy, folds under ReplaceAll") {
  const char* src =
      "PROGRAM MAIN\nREAL R, AREA\nPARAMETER (PI = 3.14159)\nREAD *, R\n"
      "AREA = 2.0 * PI * R\nPRINT *, AREA\nEND";
  auto c = testutil::compile_one(src);

  auto keep = specialize(c, {}, ReplacementPolicy::keep_list({}));
  CHECK(main_text(keep).find("2.0 * PI * R") != std::string::npos);
  check_equivalent(c, keep, {});

  auto all = specialize(c, {}, ReplacementPolicy::all());
  std::string text = main_text(all);
  CHECK(text.find("PI * R") == std::string::npos);
  CHECK(text.find("3.14159") != std::string::npos);
  check_equivalent(c, all, {});
}

TEST_CASE("ReplaceNone still propagates in the environment") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER N, Y\nN = 3\nIF (N .EQ. 3) THEN\nY = 1\nELSE\nY = 2\n"
      "END IF\nPRINT *, Y, N\nEND");
  auto r = specialize(c, {}, ReplacementPolicy::none());
  std::string text = main_text(r);
  // branch folded even though no text was substituted
  CHECK(text.find("IF") == std::string::npos);
  CHECK(text.find("PRINT *, Y, N") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("dead assignment removal with the liveness rules") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER T, X\nT = 5\nX = T + 1\nPRINT *, X\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  // under ReplaceAll the PRINT folds to 6, so both stores go dead
  CHECK(text.find("T = 5") == std::string::npos);
  CHECK(text.find("X =") == std::string::npos);
  CHECK(text.find("PRINT *, 6") != std::string::npos);
  CHECK(r.report.removed_with_reason("dead-assignment").size() == 2);
  check_equivalent(c, r, {});

  // under ReplaceNone X stays symbolic in the PRINT: X = T + 1 lives,
  // T = 5 still feeds it
  auto rn = specialize(c, {}, ReplacementPolicy::none());
  std::string tn = main_text(rn);
  CHECK(tn.find("T = 5") != std::string::npos);
  CHECK(tn.find("X = T + 1") != std::string::npos);
  check_equivalent(c, rn, {});
}

TEST_CASE("dead store with an effectful RHS is kept") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER T, K\nCOMMON /B/ K\nK = 0\nT = F(1)\n"
               "PRINT *, K\nEND"},
       {"f.f", "INTEGER FUNCTION F(N)\nINTEGER N, K\nCOMMON /B/ K\nK = K + N\n"
               "F = N\nRETURN\nEND"}});
  auto r = specialize(c, {});
  CHECK(main_text(r).find("T = F") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("keep-list protects even dead assignments") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER T, X\nT = 5\nX = 7\nPRINT *, X\nEND");
  auto r = specialize(c, {}, ReplacementPolicy::keep_list({"T"}));
  CHECK(main_text(r).find("T = 5") != std::string::npos);
  auto r2 = specialize(c, {});
  CHECK(main_text(r2).find("T = 5") == std::string::npos);
}

TEST_CASE("formals, COMMON members, and array cells are never removed") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER X\nX = 3\nCALL S(X)\nEND"},
       {"s.f", "SUBROUTINE S(A)\nINTEGER A, K\nREAL V(2)\nCOMMON /B/ K\n"
               "A = 1\nK = 2\nV(1) = 0.0\nRETURN\nEND"}});
  auto r = specialize(c, {});
  const Unit* variant = nullptr;
  for (const auto& u : r.residual.units)
    if (u.name.rfind("S", 0) == 0 && u.kind == UnitKind::Subroutine) variant = &u;
  REQUIRE(variant);
  std::string text = unit_text(*variant);
  CHECK(text.find("A = 1") != std::string::npos);
  CHECK(text.find("K = 2") != std::string::npos);
  CHECK(text.find("V(1) = 0.0") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("polyvariant specialization: two keys, two variants, cache hits") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nREAL X\nREAD *, X\nCALL SOLVE(3, X)\nCALL SOLVE(5, X)\n"
               "CALL SOLVE(3, X)\nPRINT *, X\nEND"},
       {"s.f", "SUBROUTINE SOLVE(MODE, OUT)\nINTEGER MODE\nREAL OUT\n"
               "IF (MODE .EQ. 3) THEN\nOUT = OUT + 1.0\nELSE\nOUT = OUT * 2.0\n"
               "END IF\nRETURN\nEND"}});
  auto r = specialize(c, {});
  const VariantRecord* v1 = r.report.find_variant("SOLVE_1");
  const VariantRecord* v2 = r.report.find_variant("SOLVE_2");
  REQUIRE(v1);
  REQUIRE(v2);
  CHECK(v1->cache_hits >= 1);  // the repeated (3, X) site
  CHECK(v2->cache_hits == 0);
  const Unit* u1 = r.residual.find_unit("SOLVE_1");
  const Unit* u2 = r.residual.find_unit("SOLVE_2");
  REQUIRE(u1);
  REQUIRE(u2);
  CHECK_FALSE(body_equal(u1->body, u2->body, false));
  // variants keep the original signature and declarations
  CHECK(u1->formals == std::vector<std::string>{"MODE", "OUT"});
  CHECK(u1->decls.size() == c.program.units[1].decls.size());
  std::string text = main_text(r);
  CHECK(text.find("CALL SOLVE_1(3, X)") != std::string::npos);
  CHECK(text.find("CALL SOLVE_2(5, X)") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("same key at two sites shares one variant") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nREAL X\nREAD *, X\nCALL SOLVE(3, X)\nCALL SOLVE(3, X)\n"
               "PRINT *, X\nEND"},
       {"s.f", "SUBROUTINE SOLVE(MODE, OUT)\nINTEGER MODE\nREAL OUT\n"
               "IF (MODE .EQ. 3) THEN\nOUT = OUT + 1.0\nELSE\nOUT = OUT * 2.0\n"
               "END IF\nRETURN\nEND"}});
  auto r = specialize(c, {});
  int solve_variants = 0;
  for (const auto& v : r.report.variants)
    if (v.origin == "SOLVE") ++solve_variants;
  CHECK(solve_variants == 1);
}

TEST_CASE("aliased call sites get their own variants even with equal known values") {
  // CALL S(X, X) must not reuse the variant built for CALL S(X, Y):
  // the aliased site invalidates folding after a write through A
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER X, Y\nX = 3\nY = 3\nCALL S(X, Y)\n"
               "PRINT *, X, Y\nX = 3\nCALL S(X, X)\nPRINT *, X\nEND"},
       {"s.f", "SUBROUTINE S(A, B)\nINTEGER A, B\nA = A + 1\nPRINT *, B\n"
               "RETURN\nEND"}});
  auto r = specialize(c, {});
  int s_variants = 0;
  for (const auto& v : r.report.variants)
    if (v.origin == "S") ++s_variants;
  CHECK(s_variants == 2);
  check_equivalent(c, r, {});
}

TEST_CASE("empty constraint set with ReplaceAll leaves a constant-free program intact") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER X, Y\nREAD *, X\nREAD *, Y\n"
               "IF (X .GT. Y) THEN\nPRINT *, X\nELSE\nPRINT *, Y\nEND IF\nEND"}});
  auto r = specialize(c, {});
  const VariantRecord* v = r.report.find_variant("MAIN");
  REQUIRE(v);
  for (const auto& [prov, rec] : v->stmts) CHECK(rec.disposition == Disposition::Kept);
  CHECK(program_equal(r.residual, c.program, /*compare_prov=*/true));
}

TEST_CASE("COMMON constraint propagates interprocedurally") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER N\nCOMMON /CFG/ N\nCALL WORK\nEND"},
       {"w.f", "SUBROUTINE WORK\nINTEGER K, Y\nCOMMON /CFG/ K\n"
               "IF (K .EQ. 3) THEN\nY = 1\nELSE\nY = 2\nEND IF\nPRINT *, Y\n"
               "RETURN\nEND"}});
  ConstraintSet cs = parse_cs("GLOBAL:\nN = 3\n");
  auto r = specialize(c, cs);
  const Unit* w = nullptr;
  for (const auto& u : r.residual.units)
    if (u.kind == UnitKind::Subroutine) w = &u;
  REQUIRE(w);
  std::string text = unit_text(*w);
  CHECK(text.find("IF") == std::string::npos);
  CHECK(text.find("PRINT *, 1") != std::string::npos);
  check_equivalent(c, r, cs);
}

TEST_CASE("writes through one alias kill knowledge of the other") {
  // X lives in COMMON; S gets it as a formal and also sees the block
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER X\nCOMMON /B/ X\nX = 3\nCALL S(X)\n"
               "PRINT *, X\nEND"},
       {"s.f", "SUBROUTINE S(A)\nINTEGER A, X\nCOMMON /B/ X\nA = 5\n"
               "PRINT *, X\nRETURN\nEND"}});
  auto r = specialize(c, {});
  const Unit* s = nullptr;
  for (const auto& u : r.residual.units)
    if (u.kind == UnitKind::Subroutine) s = &u;
  REQUIRE(s);
  // X must not fold to 3 after the write through A
  std::string text = unit_text(*s);
  CHECK(text.find("PRINT *, X") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("unreachable units are copied verbatim and flagged") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER X\nX = 1\nPRINT *, X\nEND"},
       {"s.f", "SUBROUTINE NEVER(A)\nINTEGER A\nA = A + 1\nRETURN\nEND"}});
  auto r = specialize(c, {});
  REQUIRE(r.report.unreachable_units == std::vector<std::string>{"NEVER"});
  const Unit* nv = r.residual.find_unit("NEVER");
  REQUIRE(nv);
  CHECK(unit_equal(*nv, c.program.units[1], /*compare_prov=*/true));
}

TEST_CASE("recursive procedures: same key targets the in-progress variant") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER N, R\nREAD *, N\nR = FACT(N)\nPRINT *, R\nEND"},
       {"f.f", "INTEGER FUNCTION FACT(N)\nINTEGER N\nIF (N .LE. 1) THEN\nFACT = 1\n"
               "ELSE\nFACT = N * FACT(N - 1)\nEND IF\nRETURN\nEND"}});
  auto r = specialize(c, {});
  // nothing known about N: one universal variant, recursion bound
  int fact_variants = 0;
  for (const auto& v : r.report.variants)
    if (v.origin == "FACT") ++fact_variants;
  CHECK(fact_variants == 1);
  check_equivalent(c, r, {});
}

TEST_CASE("recursive procedures only get the context-free variant") {
  // keyed variants of a recursive procedure would peel one level per
  // re-specialization; a known entry argument still targets the
  // universal variant
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER R\nR = FACT(4)\nPRINT *, R\nEND"},
       {"f.f", "INTEGER FUNCTION FACT(N)\nINTEGER N\nIF (N .LE. 1) THEN\nFACT = 1\n"
               "ELSE\nFACT = N * FACT(N - 1)\nEND IF\nRETURN\nEND"}});
  auto r = specialize(c, {});
  CHECK(r.residual.find_unit("FACT") != nullptr);
  CHECK(r.residual.find_unit("FACT_1") == nullptr);
  CHECK(main_text(r).find("FACT(4)") != std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("variant cap raises RecursionDepthExceeded") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nREAL X\nX = 0.0\nCALL S(1, X)\nCALL S(2, X)\n"
               "CALL S(3, X)\nPRINT *, X\nEND"},
       {"s.f", "SUBROUTINE S(M, OUT)\nINTEGER M\nREAL OUT\nOUT = OUT + M\n"
               "RETURN\nEND"}});
  SpecializeConfig config;
  config.variant_cap = 2;
  try {
    specialize_program(c.program, c.symtab, {}, config);
    FAIL("expected RecursionDepthExceeded");
  } catch (const CompileError& e) {
    CHECK(e.kind() == ErrorKind::RecursionDepthExceeded);
  }
}

TEST_CASE("policy choice changes texts but not dead-branch decisions") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER MODE, Y\nMODE = 2\nIF (MODE .EQ. 2) THEN\nY = 1\n"
      "ELSE\nY = 2\nEND IF\nPRINT *, Y, MODE\nEND");
  auto all = specialize(c, {}, ReplacementPolicy::all());
  auto none = specialize(c, {}, ReplacementPolicy::none());
  auto keep = specialize(c, {}, ReplacementPolicy::keep_list({"MODE"}));
  auto dead_all = all.report.removed_with_reason("dead-branch");
  CHECK(dead_all == none.report.removed_with_reason("dead-branch"));
  CHECK(dead_all == keep.report.removed_with_reason("dead-branch"));
  CHECK_FALSE(dead_all.empty());
}

TEST_CASE("structure checks pass on a specialized program") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER MODE, Y\nMODE = 2\n"
               "IF (MODE .EQ. 2) THEN\nCALL A(Y)\nELSE\nCALL B(Y)\nEND IF\n"
               "PRINT *, Y\nEND"},
       {"a.f", "SUBROUTINE A(OUT)\nINTEGER OUT\nOUT = 1\nRETURN\nEND"},
       {"b.f", "SUBROUTINE B(OUT)\nINTEGER OUT\nOUT = 2\nRETURN\nEND"}});
  auto r = specialize(c, {});
  auto violations = check_structure(c.program, r.residual, r.report);
  for (const auto& v : violations) MESSAGE(v);
  CHECK(violations.empty());
  // B is unreachable under MODE = 2
  CHECK(r.report.unreachable_units == std::vector<std::string>{"B"});
}

TEST_CASE("specialization is idempotent") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER MODE\nREAL X\nMODE = 3\nX = 0.0\n"
               "CALL SOLVE(MODE, X)\nCALL SOLVE(5, X)\nPRINT *, X\nEND"},
       {"s.f", "SUBROUTINE SOLVE(M, OUT)\nINTEGER M\nREAL OUT\n"
               "IF (M .EQ. 3) THEN\nOUT = OUT + 1.0\nELSE\nOUT = OUT * 2.0\n"
               "END IF\nRETURN\nEND"}});
  auto r1 = specialize(c, {});
  auto files1 = pretty_print(r1.residual);

  auto c2 = testutil::compile(files1);
  auto r2 = specialize(c2, {});
  auto files2 = pretty_print(r2.residual);
  REQUIRE(files1.size() == files2.size());
  for (size_t i = 0; i < files1.size(); ++i) {
    CHECK(files1[i].second == files2[i].second);
  }
}

TEST_CASE("empty surviving arm with an effectful condition keeps a CONTINUE") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM MAIN\nINTEGER T, K\nCOMMON /B/ K\nK = 0\n"
               "IF (F(1) .GT. 0) THEN\nT = 5\nEND IF\nPRINT *, K\nEND"},
       {"f.f", "INTEGER FUNCTION F(N)\nINTEGER N, K\nCOMMON /B/ K\nK = K + N\n"
               "F = N\nRETURN\nEND"}});
  auto r = specialize(c, {});
  std::string text = main_text(r);
  // T = 5 is dead, but F's effect must stay: IF (...) THEN CONTINUE
  CHECK(text.find("IF (F") != std::string::npos);
  CHECK(text.find("CONTINUE") != std::string::npos);
  CHECK(text.find("T = 5") == std::string::npos);
  check_equivalent(c, r, {});
}

TEST_CASE("effect-free empty IF disappears entirely") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER T, X\nREAD *, X\nIF (X .GT. 0) THEN\nT = 5\n"
      "END IF\nPRINT *, X\nEND");
  auto r = specialize(c, {});
  std::string text = main_text(r);
  CHECK(text.find("IF") == std::string::npos);
  CHECK(r.report.removed_with_reason("empty-if").size() == 1);
  check_equivalent(c, r, {});
}

TEST_CASE("unsupported condition shapes refine nothing") {
  auto c = testutil::compile_one(
      "PROGRAM MAIN\nINTEGER K, Y\nREAD *, K\nIF (K .LT. 7) THEN\nY = K\nELSE\n"
      "Y = K + 1\nEND IF\nPRINT *, Y\nEND");
  auto r = specialize(c, {});
  CHECK(r.report.facts_fired.empty());
  // neither arm learned anything about K
  std::string text = main_text(r);
  CHECK(text.find("Y = K") != std::string::npos);
  CHECK(text.find("Y = K + 1") != std::string::npos);
  check_equivalent(c, r, {});
}
