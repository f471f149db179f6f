#include <doctest.h>

#include <cstdint>
#include <sstream>

#include "residua/difftest.hpp"
#include "residua/pretty.hpp"
#include "residua/specialize.hpp"
#include "test_util.hpp"

using namespace residua;

// Randomized whole-pipeline property: for generated well-formed programs
// (every variable initialized before use, divisions by nonzero literals,
// subscripts in bounds, loops bounded), specialization must preserve
// observables under every policy, and the residual must respect the
// structural invariants and re-specialize to a fixpoint.

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t s) : state(s + 0x9E3779B97F4A7C15ull) {}
  std::uint64_t operator()() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>((*this)() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(int percent) { return range(1, 100) <= percent; }
};

class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  std::vector<std::pair<std::string, std::string>> generate() {
    std::ostringstream main;
    main << "PROGRAM MAIN\n";
    main << "INTEGER A, B, D, I, K, GA, GB\n";
    main << "REAL R, S, AR(4)\n";
    main << "LOGICAL L\n";
    main << "COMMON /G/ GA, GB\n";
    // A arrives via READ, B and GA via pinned constraints, the rest by
    // explicit initialization: nothing is ever read uninitialized
    main << "READ *, A\n";
    main << "D = " << rng_.range(-9, 9) << "\n";
    main << "GB = " << rng_.range(-9, 9) << "\n";
    main << "K = 0\n";
    main << "R = " << rng_.range(-9, 9) << ".5\n";
    main << "S = R\n";
    main << "L = A .GT. 0\n";
    main << "AR(1) = R\nAR(2) = S\nAR(3) = 0.0\nAR(4) = 1.0\n";
    emit_stmts(main, 8, 2, true);
    main << "PRINT *, A, B, D, K, GA, GB\nPRINT *, R, S, L\n";
    main << "END\n";

    std::ostringstream sub;
    sub << "SUBROUTINE STIR(P, Q)\n";
    sub << "INTEGER P, Q, T, GA, GB\n";
    sub << "COMMON /G/ GA, GB\n";
    sub << "T = P + Q\n";
    sub << "IF (T .GT. 10) THEN\nT = T - GA\nEND IF\n";
    sub << "P = T + GB\n";
    if (rng_.chance(50)) sub << "GB = GB + 1\n";
    sub << "PRINT *, T\nRETURN\nEND\n";

    std::ostringstream rset;
    rset << "SUBROUTINE RSET(X)\n";
    rset << "REAL X\n";
    rset << "X = X * 0.5 + 1.25\n";
    if (rng_.chance(40)) rset << "PRINT *, X\n";
    rset << "RETURN\nEND\n";

    std::ostringstream fn;
    fn << "INTEGER FUNCTION MIX(V)\n";
    fn << "INTEGER V, GA, GB\n";
    fn << "COMMON /G/ GA, GB\n";
    fn << "MIX = V * 2 + GA\n";
    if (rng_.chance(40)) fn << "MIX = MIX - GB\n";
    fn << "RETURN\nEND\n";

    return {{"main.f", main.str()},
            {"rset.f", rset.str()},
            {"stir.f", sub.str()},
            {"mix.f", fn.str()}};
  }

  std::string constraints() {
    std::ostringstream out;
    out << "UNIT MAIN:\nB = " << rng_.range(-5, 5) << "\n";
    out << "GLOBAL:\nGA = " << rng_.range(-5, 5) << "\n";
    return out.str();
  }

 private:
  std::string int_var() {
    static const char* pool[] = {"A", "B", "D", "K", "GA", "GB"};
    return pool[rng_.range(0, 5)];
  }
  std::string real_var() { return rng_.chance(50) ? "R" : "S"; }

  std::string int_expr(int depth) {
    if (depth <= 0 || rng_.chance(35)) {
      if (rng_.chance(40)) return std::to_string(rng_.range(-9, 9));
      if (rng_.chance(20)) return "MIX(" + int_var() + ")";
      return int_var();
    }
    std::string l = int_expr(depth - 1), r = int_expr(depth - 1);
    switch (rng_.range(0, 4)) {
      case 0: return "(" + l + " + " + r + ")";
      case 1: return "(" + l + " - " + r + ")";
      case 2: return "(" + l + " * " + std::to_string(rng_.range(-3, 3)) + ")";
      case 3: return "(" + l + " / " + std::to_string(rng_.chance(50) ? 2 : 3) + ")";
      default: return "(" + l + " ** " + std::to_string(rng_.range(0, 2)) + ")";
    }
  }

  std::string real_expr(int depth) {
    if (depth <= 0 || rng_.chance(40)) {
      if (rng_.chance(30)) return std::to_string(rng_.range(-9, 9)) + ".25";
      if (rng_.chance(25)) return "AR(" + std::to_string(rng_.range(1, 4)) + ")";
      return real_var();
    }
    std::string l = real_expr(depth - 1), r = real_expr(depth - 1);
    switch (rng_.range(0, 3)) {
      case 0: return "(" + l + " + " + r + ")";
      case 1: return "(" + l + " - " + r + ")";
      case 2: return "(" + l + " * 0.5)";
      default: return "(" + l + " / 4.0)";
    }
  }

  std::string logical_expr(int depth) {
    if (depth <= 0 || rng_.chance(50)) {
      static const char* rel[] = {".EQ.", ".NE.", ".LT.", ".LE.", ".GT.", ".GE."};
      return "(" + int_var() + " " + rel[rng_.range(0, 5)] + " " +
             std::to_string(rng_.range(-5, 5)) + ")";
    }
    std::string l = logical_expr(depth - 1), r = logical_expr(depth - 1);
    if (rng_.chance(20)) return "(.NOT. " + l + ")";
    return "(" + l + (rng_.chance(50) ? " .AND. " : " .OR. ") + r + ")";
  }

  // `calls_ok` is off inside countdown loops: a by-reference call could
  // overwrite the counter and unbound the loop
  void emit_stmts(std::ostringstream& out, int count, int depth, bool allow_blocks,
                  bool calls_ok = true) {
    for (int i = 0; i < count; ++i) {
      long long kind = rng_.range(0, allow_blocks && depth > 0 ? 8 : 5);
      if (!calls_ok && (kind == 0 || kind == 3 || kind == 5)) kind = 1;
      switch (kind) {
        case 0:
          out << int_var() << " = " << int_expr(2) << "\n";
          break;
        case 1:
          out << real_var() << " = " << real_expr(2) << "\n";
          break;
        case 2:
          out << "AR(" << rng_.range(1, 4) << ") = " << real_expr(1) << "\n";
          break;
        case 3: {
          bool aliased = rng_.chance(30);
          std::string a = int_var();
          out << "CALL STIR(" << a << ", " << (aliased ? a : int_expr(1)) << ")\n";
          break;
        }
        case 4:
          out << "PRINT *, " << int_var() << ", " << real_var() << "\n";
          break;
        case 5: {
          // by-reference real actual: a scalar or an array element
          if (rng_.chance(50)) {
            out << "CALL RSET(" << real_var() << ")\n";
          } else {
            out << "CALL RSET(AR(" << rng_.range(1, 4) << "))\n";
          }
          break;
        }
        case 6: {
          out << "IF " << logical_expr(1) << " THEN\n";
          emit_stmts(out, static_cast<int>(rng_.range(1, 2)), depth - 1, true);
          if (rng_.chance(60)) {
            out << "ELSE\n";
            emit_stmts(out, static_cast<int>(rng_.range(1, 2)), depth - 1, true);
          }
          out << "END IF\n";
          break;
        }
        case 7: {
          long long lo = rng_.range(-2, 2);
          long long hi = lo + rng_.range(-2, 4);
          out << "DO I = " << lo << ", " << hi;
          // occasional stepped or downward loops, zero-trip included
          if (rng_.chance(30)) out << ", " << (rng_.chance(50) ? 2 : -1);
          out << "\n";
          emit_stmts(out, 1, depth - 1, false);
          out << "END DO\n";
          break;
        }
        default: {
          // bounded countdown loop; the body must leave K alone
          out << "K = " << rng_.range(1, 4) << "\n";
          out << "DO WHILE (K .GT. 0)\n";
          emit_stmts(out, 1, depth - 1, false, /*calls_ok=*/false);
          out << "K = K - 1\n";
          out << "END DO\n";
          break;
        }
      }
    }
  }

  Rng rng_;
};

}  // namespace

TEST_CASE("random programs: specialization preserves observables under all policies") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    ProgramGen gen(seed);
    auto files = gen.generate();
    CAPTURE(seed);
    testutil::Compiled c;
    try {
      c = testutil::compile(files);
    } catch (const CompileError& e) {
      FAIL("generated program failed to compile: " << e.what() << "\n"
                                                   << files[0].second);
    }
    ConstraintSet cs = parse_constraints(gen.constraints(), "fuzz.pec");

    for (auto policy : {ReplacementPolicy::all(), ReplacementPolicy::none(),
                        ReplacementPolicy::keep_list({"GA", "R"})}) {
      SpecializeConfig config;
      config.policy = policy;
      SpecializeResult r = specialize_program(c.program, c.symtab, cs, config);

      auto violations = check_structure(c.program, r.residual, r.report);
      if (!violations.empty()) {
        FAIL("structure violation (seed " << seed << "): " << violations.front());
      }

      SymbolTable resid_symtab = resolve_symbols(r.residual);
      DiffConfig dc;
      dc.trials = 30;
      dc.seed = seed;
      Verdict v = diff_test(c.program, c.symtab, r.residual, resid_symtab, r.report,
                            cs, dc);
      if (!v.passed) {
        std::string src;
        for (const auto& [path, text] : files) src += "--- " + path + "\n" + text;
        FAIL("divergence (seed " << seed << "): " << v.mismatch << "\n"
                                 << src);
      }

      // idempotence on the generated program as well
      auto files1 = pretty_print(r.residual);
      auto c2 = testutil::compile(files1);
      SpecializeResult r2 = specialize_program(c2.program, c2.symtab, cs, config);
      auto files2 = pretty_print(r2.residual);
      REQUIRE(files1.size() == files2.size());
      for (size_t i = 0; i < files1.size(); ++i) {
        if (files1[i].second != files2[i].second) {
          FAIL("re-specialization differs (seed " << seed << ") in "
                                                  << files1[i].first);
        }
      }
    }
  }
}
