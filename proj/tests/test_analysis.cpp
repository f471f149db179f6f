#include <doctest.h>

#include <cstdint>

#include "residua/analysis.hpp"
#include "residua/interp.hpp"
#include "test_util.hpp"

using namespace residua;

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t s) : state(s) {}
  std::uint64_t operator()() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 33;
  }
};

AbstractEnv env_of(const UnitSymbols& us,
                   const std::vector<std::pair<std::string, Value>>& knowns) {
  AbstractEnv env;
  for (const auto& [name, v] : knowns) env.knowns[us.location_of(name)] = v;
  return env;
}

}  // namespace

TEST_CASE("eval_abstract folds constants") {
  auto c = testutil::compile_one(
      "PROGRAM M\nINTEGER X, Y\nREAL R\nX = 1\nY = 2\nR = 0.5\nEND");
  const UnitSymbols& us = c.symtab.unit("M");
  auto eval_src = [&](const std::string& text, const AbstractEnv& env) {
    Program p = parse_program(
        {{"e.f", "PROGRAM M\nINTEGER X, Y\nREAL R\nX = " + text + "\nEND"}});
    return eval_abstract(*p.units[0].body[0]->value, env, us, c.symtab);
  };
  AbstractEnv empty;
  auto v = eval_src("2 + 3", empty);
  REQUIRE(v.known);
  CHECK(v.value.i == 5);

  v = eval_src("X * 10", env_of(us, {{"X", Value::integer(4)}}));
  REQUIRE(v.known);
  CHECK(v.value.i == 40);

  v = eval_src("X + Y", env_of(us, {{"X", Value::integer(1)}}));
  CHECK_FALSE(v.known);
}

TEST_CASE("disequality facts decide matching comparisons") {
  auto c = testutil::compile_one("PROGRAM M\nINTEGER X\nX = 0\nEND");
  const UnitSymbols& us = c.symtab.unit("M");
  AbstractEnv env;
  env.add_fact(us.location_of("X"), Value::integer(4));

  Program eq = parse_program({{"e.f", "PROGRAM M\nINTEGER X\nLOGICAL L\nX = 0\n"
                                      "L = X .EQ. 4\nEND"}});
  auto v = eval_abstract(*eq.units[0].body[1]->value, env, us, c.symtab);
  REQUIRE(v.known);
  CHECK(v.value.b == false);

  Program ne = parse_program({{"e.f", "PROGRAM M\nINTEGER X\nLOGICAL L\nX = 0\n"
                                      "L = X .NE. 4\nEND"}});
  v = eval_abstract(*ne.units[0].body[1]->value, env, us, c.symtab);
  REQUIRE(v.known);
  CHECK(v.value.b == true);

  // a different literal is not decided by the fact
  Program other = parse_program({{"e.f", "PROGRAM M\nINTEGER X\nLOGICAL L\nX = 0\n"
                                         "L = X .EQ. 5\nEND"}});
  v = eval_abstract(*other.units[0].body[1]->value, env, us, c.symtab);
  CHECK_FALSE(v.known);
}

TEST_CASE("integer division truncates toward zero, checked against the interpreter") {
  // the interpreter is the independent route for the same expressions
  auto cases = std::vector<std::pair<long long, long long>>{
      {7, 2}, {-7, 2}, {7, -2}, {-7, -2}, {1, 3}, {-1, 3}};
  for (auto [a, b] : cases) {
    std::string src = "PROGRAM M\nINTEGER X\nX = " + std::to_string(a) + " / (" +
                      std::to_string(b) + ")\nPRINT *, X\nEND";
    auto c = testutil::compile_one(src);
    ConcreteState st = run(c.program, c.symtab, {});
    REQUIRE(st.exit == ExitKind::Normal);
    AbstractEnv empty;
    auto v = eval_abstract(*c.program.units[0].body[0]->value, empty,
                           c.symtab.unit("M"), c.symtab);
    REQUIRE(v.known);
    CHECK(std::to_string(v.value.i) == st.trace[0]);
  }
}

TEST_CASE("division by a known zero folds to Unknown with a note") {
  auto c = testutil::compile_one("PROGRAM M\nINTEGER X\nX = 4 / 0\nPRINT *, X\nEND");
  std::vector<std::string> notes;
  EvalHooks hooks;
  hooks.notes = &notes;
  AbstractEnv empty;
  auto v = eval_abstract(*c.program.units[0].body[0]->value, empty, c.symtab.unit("M"),
                         c.symtab, hooks);
  CHECK_FALSE(v.known);
  CHECK(notes.size() == 1);
}

TEST_CASE("join_env basics") {
  auto c = testutil::compile_one("PROGRAM M\nINTEGER X\nX = 0\nEND");
  const UnitSymbols& us = c.symtab.unit("M");
  Location x = us.location_of("X");

  AbstractEnv a = env_of(us, {{"X", Value::integer(1)}});
  AbstractEnv b = env_of(us, {{"X", Value::integer(1)}});
  CHECK(join_env(a, b).get(x).known);

  AbstractEnv d = env_of(us, {{"X", Value::integer(2)}});
  CHECK_FALSE(join_env(a, d).get(x).known);
}

// Property: join_env agrees with a brute-force three-point lattice
// {Unknown, K1, K2} oracle, pointwise, and satisfies the lattice laws.
TEST_CASE("join_env laws against a three-point lattice oracle") {
  auto c = testutil::compile_one(
      "PROGRAM M\nINTEGER A, B, D\nA = 0\nB = 0\nD = 0\nEND");
  const UnitSymbols& us = c.symtab.unit("M");
  std::vector<Location> locs = {us.location_of("A"), us.location_of("B"),
                                us.location_of("D")};

  // oracle over codes: 0 = Unknown, 1 = Known(1), 2 = Known(2)
  auto oracle_join = [](int x, int y) { return x == y ? x : 0; };
  auto encode = [&](const AbstractEnv& env, const Location& l) {
    auto v = env.get(l);
    return v.known ? static_cast<int>(v.value.i) : 0;
  };

  Rng rng(2024);
  auto random_env = [&] {
    AbstractEnv env;
    for (const auto& l : locs) {
      int code = static_cast<int>(rng() % 3);
      if (code != 0) env.knowns[l] = Value::integer(code);
    }
    return env;
  };

  for (int trial = 0; trial < 1200; ++trial) {
    AbstractEnv a = random_env(), b = random_env(), d = random_env();
    AbstractEnv ab = join_env(a, b);
    for (const auto& l : locs)
      CHECK(encode(ab, l) == oracle_join(encode(a, l), encode(b, l)));
    // commutativity
    AbstractEnv ba = join_env(b, a);
    for (const auto& l : locs) CHECK(encode(ab, l) == encode(ba, l));
    // associativity
    AbstractEnv left = join_env(join_env(a, b), d);
    AbstractEnv right = join_env(a, join_env(b, d));
    for (const auto& l : locs) CHECK(encode(left, l) == encode(right, l));
    // idempotence
    AbstractEnv aa = join_env(a, a);
    for (const auto& l : locs) CHECK(encode(aa, l) == encode(a, l));
    // Unknown absorbs
    AbstractEnv unknown;
    AbstractEnv au = join_env(a, unknown);
    for (const auto& l : locs) CHECK(encode(au, l) == 0);
  }
}

TEST_CASE("join_env intersects fact sets") {
  auto c = testutil::compile_one("PROGRAM M\nINTEGER X, Y\nX = 0\nY = 0\nEND");
  const UnitSymbols& us = c.symtab.unit("M");
  AbstractEnv a, b;
  a.add_fact(us.location_of("X"), Value::integer(1));
  a.add_fact(us.location_of("Y"), Value::integer(2));
  b.add_fact(us.location_of("X"), Value::integer(1));
  AbstractEnv j = join_env(a, b);
  CHECK(j.has_fact(us.location_of("X"), Value::integer(1)));
  CHECK_FALSE(j.has_fact(us.location_of("Y"), Value::integer(2)));
}

TEST_CASE("mod summary: direct formal write") {
  auto c = testutil::compile({{"m.f", "PROGRAM M\nINTEGER X\nX = 0\nCALL S(X)\nEND"},
                              {"s.f", "SUBROUTINE S(A)\nINTEGER A\nA = 1\nRETURN\nEND"}});
  ModSummaries mods = mod_summaries(c.program, c.symtab);
  CHECK(mods.at("S").formals == std::set<int>{0});
  CHECK(mods.at("S").commons.empty());
  CHECK(mods.at("M").formals.empty());
}

TEST_CASE("mod summary: transitivity through an actual bound to COMMON") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER X\nCOMMON /B/ X\nX = 0\nCALL S\nEND"},
       {"s.f", "SUBROUTINE S\nINTEGER X\nCOMMON /B/ X\nCALL T(X)\nRETURN\nEND"},
       {"t.f", "SUBROUTINE T(A)\nINTEGER A\nA = 1\nRETURN\nEND"}});
  ModSummaries mods = mod_summaries(c.program, c.symtab);
  CHECK(mods.at("T").formals == std::set<int>{0});
  CHECK(mods.at("S").commons.count(Location::common("B", 0)) == 1);
  CHECK(mods.at("M").commons.count(Location::common("B", 0)) == 1);
}

TEST_CASE("mod summary: mutual recursion reaches the hand-computed fixpoint") {
  // S writes cell 0 and calls T; T writes cell 1 and calls S.
  // Fixpoint (computed by hand on the 2-node graph): both summaries
  // contain both cells.
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER D\nD = 1\nCALL S(D)\nEND"},
       {"s.f", "SUBROUTINE S(D)\nINTEGER D, X, Y\nCOMMON /B/ X, Y\nX = 1\n"
               "IF (D .GT. 0) THEN\nCALL T(D - 1)\nEND IF\nRETURN\nEND"},
       {"t.f", "SUBROUTINE T(D)\nINTEGER D, X, Y\nCOMMON /B/ X, Y\nY = 2\n"
               "IF (D .GT. 0) THEN\nCALL S(D - 1)\nEND IF\nRETURN\nEND"}});
  ModSummaries mods = mod_summaries(c.program, c.symtab);
  std::set<Location> both = {Location::common("B", 0), Location::common("B", 1)};
  CHECK(mods.at("S").commons == both);
  CHECK(mods.at("T").commons == both);
}

TEST_CASE("mod summaries over-approximate observed writes") {
  // instrumented interpreter writes must always be inside the summary
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER X, Y, MODE\nCOMMON /B/ X, Y\nX = 0\nY = 0\n"
               "READ *, MODE\nIF (MODE .GT. 0) THEN\nCALL S(X)\nELSE\nCALL S(Y)\n"
               "END IF\nPRINT *, X, Y\nEND"},
       {"s.f", "SUBROUTINE S(A)\nINTEGER A\nA = A + 1\nRETURN\nEND"}});
  ModSummaries mods = mod_summaries(c.program, c.symtab);
  for (long long mode : {-3, 0, 2}) {
    InputVector in;
    in[InputKey::unit_var("M", "MODE")] = {Value::integer(mode), false};
    RunHooks hooks;
    std::vector<std::string> violations;
    hooks.on_write = [&](const std::string& unit, const ModInfo& w) {
      // the summary must contain at least one view of the written storage
      const ModInfo& summary = mods.at(unit);
      bool covered = false;
      for (int f : w.formals)
        if (summary.formals.count(f)) covered = true;
      for (const auto& l : w.commons)
        if (summary.commons.count(l)) covered = true;
      if (!covered) violations.push_back(unit + " write not covered by its summary");
    };
    ConcreteState st = run(c.program, c.symtab, in, kDefaultFuel, hooks);
    REQUIRE(st.exit == ExitKind::Normal);
    CHECK(violations.empty());
  }
}

TEST_CASE("bind_call: simple Known actual flows into the formal") {
  auto c = testutil::compile({{"m.f", "PROGRAM M\nINTEGER X\nX = 3\nCALL S(X)\nEND"},
                              {"s.f", "SUBROUTINE S(A)\nINTEGER A\nA = A\nRETURN\nEND"}});
  const UnitSymbols& caller = c.symtab.unit("M");
  const Unit& callee = *c.program.find_unit("S");
  AbstractEnv env = env_of(caller, {{"X", Value::integer(3)}});
  const Stmt& call = *c.program.units[0].body[1];
  CallBinding cb = bind_call(call.args, caller, env, callee, c.symtab.unit("S"), c.symtab);
  auto v = cb.entry_env.get(Location::local("S", "A"));
  REQUIRE(v.known);
  CHECK(v.value.i == 3);
  CHECK(cb.alias_groups.empty());
}

TEST_CASE("bind_call: same actual twice aliases both formals") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER X\nX = 3\nCALL S(X, X)\nEND"},
       {"s.f", "SUBROUTINE S(A, B)\nINTEGER A, B\nA = B\nRETURN\nEND"}});
  const UnitSymbols& caller = c.symtab.unit("M");
  const Unit& callee = *c.program.find_unit("S");
  const Stmt& call = *c.program.units[0].body[1];

  AbstractEnv env = env_of(caller, {{"X", Value::integer(3)}});
  CallBinding cb = bind_call(call.args, caller, env, callee, c.symtab.unit("S"), c.symtab);
  REQUIRE(cb.alias_groups.size() == 1);
  CHECK(cb.alias_groups[0] == std::vector<std::string>{"#0", "#1"});
  // both Known(3) because every member agrees
  CHECK(cb.entry_env.get(Location::local("S", "A")).known);
  CHECK(cb.entry_env.get(Location::local("S", "B")).known);

  // unknown X: both formals unknown
  AbstractEnv unknown;
  cb = bind_call(call.args, caller, unknown, callee, c.symtab.unit("S"), c.symtab);
  CHECK_FALSE(cb.entry_env.get(Location::local("S", "A")).known);
  CHECK_FALSE(cb.entry_env.get(Location::local("S", "B")).known);
}

TEST_CASE("bind_call: COMMON storage passed into a unit that also sees the block") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER X\nCOMMON /B/ X\nX = 3\nCALL S(X)\nEND"},
       {"s.f", "SUBROUTINE S(A)\nINTEGER A, X\nCOMMON /B/ X\nA = A + X\nRETURN\nEND"}});
  const UnitSymbols& caller = c.symtab.unit("M");
  const Unit& callee = *c.program.find_unit("S");
  const Stmt& call = *c.program.units[0].body[1];
  AbstractEnv env;
  env.knowns[Location::common("B", 0)] = Value::integer(3);
  CallBinding cb = bind_call(call.args, caller, env, callee, c.symtab.unit("S"), c.symtab);
  REQUIRE(cb.alias_groups.size() == 1);
  CHECK(cb.alias_groups[0] == std::vector<std::string>{"#0", "/B/(0)"});
  // value still Known: the formal and the cell agree on 3
  CHECK(cb.entry_env.get(Location::local("S", "A")).known);
  CHECK(cb.entry_env.get(Location::common("B", 0)).known);
}

TEST_CASE("apply_call_effect kills exactly the translated MOD set") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nINTEGER X, Y, K\nCOMMON /B/ K\nX = 1\nY = 2\nK = 3\n"
               "CALL S(X)\nPRINT *, X, Y, K\nEND"},
       {"s.f", "SUBROUTINE S(A)\nINTEGER A, K\nCOMMON /B/ K\nA = 0\nK = 9\n"
               "RETURN\nEND"}});
  const UnitSymbols& caller = c.symtab.unit("M");
  ModSummaries mods = mod_summaries(c.program, c.symtab);
  AbstractEnv env = env_of(caller, {{"X", Value::integer(1)}, {"Y", Value::integer(2)}});
  env.knowns[Location::common("B", 0)] = Value::integer(3);

  const Stmt& call = *c.program.units[0].body[3];
  AbstractEnv out = apply_call_effect(call.args, caller, env, *c.program.find_unit("S"),
                                      mods.at("S"), {});
  CHECK_FALSE(out.get(caller.location_of("X")).known);       // formal#0 written
  CHECK(out.get(caller.location_of("Y")).known);             // untouched
  CHECK_FALSE(out.get(Location::common("B", 0)).known);      // common written

  // callee that writes nothing leaves the environment unchanged
  ModInfo none;
  AbstractEnv same = apply_call_effect(call.args, caller, env,
                                       *c.program.find_unit("S"), none, {});
  CHECK(same.knowns == env.knowns);
}

TEST_CASE("kill semantics on COMMON spans") {
  auto c = testutil::compile(
      {{"m.f", "PROGRAM M\nREAL S, A(2)\nCOMMON /B/ S, A\nS = 0.0\nA(1) = 1.0\nEND"}});
  AbstractEnv env;
  env.knowns[Location::common("B", 0)] = Value::real(0.0);
  env.knowns[Location::common("B", 1)] = Value::real(1.0);
  env.knowns[Location::common("B", 2)] = Value::real(2.0);
  // killing the array span (cells 1..2) keeps the scalar cell 0
  env.kill(Location::common("B", 1, 2, true));
  CHECK(env.get(Location::common("B", 0)).known);
  CHECK_FALSE(env.get(Location::common("B", 1)).known);
  CHECK_FALSE(env.get(Location::common("B", 2)).known);
}
