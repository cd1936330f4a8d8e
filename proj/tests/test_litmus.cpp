#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "remap/litmus.hpp"

using namespace remap;

static const char* kSB = R"(
arch x86
thread P0 { X = 1; r1 = Y; }
thread P1 { Y = 1; r2 = X; }
exists (P0:r1=0 /\ P1:r2=0)
)";

TEST_CASE("store-buffering program parses with default init") {
  Program p = parse(kSB);
  CHECK(p.arch == Arch::X86);
  REQUIRE(p.num_threads() == 2);
  CHECK(p.init.at(Cell{"X", std::nullopt}) == 0);
  CHECK(p.init.at(Cell{"Y", std::nullopt}) == 0);
  REQUIRE(p.threads[0].code.size() == 2);
  CHECK(p.threads[0].code[0].kind == IKind::Store);
  CHECK(p.threads[0].code[1].kind == IKind::Load);
  REQUIRE(p.outcome != nullptr);
}

TEST_CASE("iriw with address dependencies") {
  Program p = parse(R"(
arch armv8
init X[1]=0 Y[1]=0
thread P0 { X[1] = 1; }
thread P1 { a = X[1]; b = Y[a]; }
thread P2 { c = Y[1]; d = X[c]; }
thread P3 { Y[1] = 1; }
)");
  REQUIRE(p.num_threads() == 4);
  DepInfo deps = derive_deps(p);
  CHECK(deps[1].addr == std::set<std::pair<int, int>>{{0, 1}});
  CHECK(deps[2].addr == std::set<std::pair<int, int>>{{0, 1}});
  CHECK(deps[0].addr.empty());
}

TEST_CASE("arch legality") {
  CHECK_THROWS_AS(parse("arch armv7\nthread P0 { dmbld; }"), Error);
  CHECK_THROWS_AS(parse("arch x86\nthread P0 { dmb; }"), Error);
  CHECK_THROWS_AS(parse("arch armv7\nthread P0 { r = X @acq; }"), Error);
  CHECK_NOTHROW(parse("arch armv8\nthread P0 { r = X @acq; X = 1 @rel; dmbld; dmbst; isb; }"));
  CHECK_NOTHROW(parse("arch armv7\nthread P0 { dmb; isb; }"));

  try {
    parse("arch armv7\nthread P0 { dmbld; }");
    FAIL("expected ArchMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ArchMismatch);
  }
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse("arch x86\nthread P0 { X = ; }");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("arch x86\nthread P0 { if r goto L; }"), Error);  // unresolved label
}

TEST_CASE("data dependency from load to store") {
  Program p = parse(R"(
arch armv8
thread P0 { a = X; Y = a; }
)");
  DepInfo deps = derive_deps(p);
  CHECK(deps[0].data == std::set<std::pair<int, int>>{{0, 1}});
  CHECK(deps[0].addr.empty());
}

TEST_CASE("false dependencies are kept") {
  Program p = parse(R"(
arch armv8
thread P0 { a = X; b = a*0; Y[b] = 1; }
)");
  DepInfo deps = derive_deps(p);
  CHECK(deps[0].addr.count({0, 2}) == 1);
}

TEST_CASE("independent accesses have no dependencies") {
  Program p = parse("arch armv8\nthread P0 { a = X; Y = 1; b = Z; }");
  DepInfo deps = derive_deps(p);
  CHECK(deps[0].addr.empty());
  CHECK(deps[0].data.empty());
  CHECK(deps[0].ctrl.empty());
  CHECK(deps[0].ctrl_isb.empty());
}

TEST_CASE("control dependencies and ctrl_isb") {
  Program p = parse(R"(
arch armv7
thread P0 { a = X; if a == 1 goto L; L: isb; Y = 1; b = Z; }
)");
  DepInfo deps = derive_deps(p);
  // nodes: 0 load, 1 branch, 2 label, 3 isb, 4 store, 5 load
  CHECK(deps[0].ctrl.count({0, 4}) == 1);
  CHECK(deps[0].ctrl.count({0, 5}) == 1);
  CHECK(deps[0].ctrl_isb.count({0, 4}) == 1);
  CHECK(deps[0].ctrl_isb.count({0, 5}) == 1);
  // the label and isb themselves are po-later than the branch
  CHECK(deps[0].ctrl.count({0, 2}) == 1);

  // without the isb there is ctrl but no ctrl_isb to the store
  Program q = parse(R"(
arch armv7
thread P0 { a = X; if a == 1 goto L; L: Y = 1; }
)");
  DepInfo dq = derive_deps(q);
  CHECK(dq[0].ctrl.count({0, 2}) == 1);
  CHECK(dq[0].ctrl_isb.empty());
}

TEST_CASE("cfg shapes") {
  SECTION("straight line") {
    Program p = parse("arch x86\nthread P0 { X = 1; Y = 2; r = Z; }");
    Cfg g = build_cfg(p, 0);
    CHECK(g.entry == 0);
    CHECK(g.succ[0] == std::vector<int>{1});
    CHECK(g.succ[1] == std::vector<int>{2});
    CHECK(g.succ[2].empty());
    CHECK_FALSE(g.has_back_edge());
  }
  SECTION("diamond") {
    Program p = parse(R"(
arch x86
thread P0 { r = X; if r == 0 goto L; Y = 1; L: Z = 1; }
)");
    Cfg g = build_cfg(p, 0);
    // nodes: 0 load, 1 branch, 2 store Y, 3 label, 4 store Z
    CHECK(g.succ[1].size() == 2);
    CHECK_FALSE(g.has_back_edge());
  }
  SECTION("wait loop has a back edge") {
    Program p = parse(R"(
arch x86
thread P0 { L: a = X; if a == 0 goto L; }
)");
    Cfg g = build_cfg(p, 0);
    // nodes: 0 label, 1 load, 2 branch; edges 0->1, 1->2, 2->0
    CHECK(g.has_back_edge());
    REQUIRE(g.succ[2].size() == 1);
    CHECK(g.succ[2][0] == 0);
  }
}

TEST_CASE("emit round-trips") {
  for (const char* src : {
           kSB,
           "arch armv8\nthread P0 { a = X @acq; X = 2 @rel; r = rmw(X, 0, 1); s = rmw(Y, 1); }",
           "arch armv8\nthread P0 { a = X @@na; Y = a @@rel; dmbfull; }",
           "arch armv7\ninit Z=5\nthread P0 { a = Z[2]; if a >= 1 goto L; b = a + 3 * a; L: isb; }",
           "arch x86\nthread P0 { }",
           "arch sc\nthread P0 { X = 1; }\nthread P1 { r = X; }\nexists (P1:r=1 \\/ X=2)",
       }) {
    Program p = parse(src);
    Program q = parse(emit(p));
    CHECK(program_equal(p, q));
    CHECK(emit(p) == emit(q));
  }
}

TEST_CASE("alias policy") {
  auto le = [](const char* base, ExprPtr idx) { return LocExpr{base, idx}; };
  ExprPtr zero = Expr::constant(0);
  ExprPtr a = Expr::regref("a");
  ExprPtr a_times_0 = Expr::binary(Expr::Op::Mul, a, zero);

  CHECK(must_alias(le("X", nullptr), le("X", nullptr)));
  CHECK_FALSE(must_alias(le("X", nullptr), le("Y", nullptr)));
  CHECK(must_alias(le("X", zero), le("X", a_times_0)));  // constant folding
  CHECK_FALSE(must_alias(le("X", a), le("X", zero)));
  CHECK(may_alias(le("X", a), le("X", zero)));
  CHECK(may_alias(le("X", nullptr), le("X", zero)));
  CHECK_FALSE(may_alias(le("X", Expr::constant(1)), le("X", zero)));
  CHECK(must_alias(le("X", a), le("X", a)));
}

TEST_CASE("dependency suffix closure properties") {
  std::mt19937_64 rng(5);
  // random straight-line programs with occasional branches
  for (int trial = 0; trial < 60; ++trial) {
    std::string src = "arch armv7\nthread P0 {\n";
    int n = 3 + static_cast<int>(rng() % 5);
    bool branched = false;
    for (int i = 0; i < n; ++i) {
      switch (rng() % 6) {
        case 0: src += "  r" + std::to_string(i) + " = X;\n"; break;
        case 1: src += "  Y = r" + std::to_string(rng() % (i + 1)) + ";\n"; break;
        case 2: src += "  Z[r" + std::to_string(rng() % (i + 1)) + "] = 1;\n"; break;
        case 3: src += "  isb;\n"; break;
        case 4:
          if (!branched) {
            src += "  if r" + std::to_string(rng() % (i + 1)) + " == 0 goto L;\n";
            branched = true;
          } else {
            src += "  r" + std::to_string(i) + " = Y;\n";
          }
          break;
        case 5:
          src += "  r" + std::to_string(i) + " = r" + std::to_string(rng() % (i + 1)) + " + 1;\n";
          break;
      }
    }
    if (branched) src += "  L:\n";
    src += "}\n";
    Program p = parse(src);
    Cfg g = build_cfg(p, 0);
    DepInfo deps = derive_deps(p);

    for (auto [i, j] : deps[0].ctrl)
      for (int k : g.order)
        if (cfg_reach(g, j, k)) CHECK(deps[0].ctrl.count({i, k}) == 1);
    for (auto [i, j] : deps[0].ctrl_isb) {
      CHECK(deps[0].ctrl.count({i, j}) == 1);
      for (int k : g.order)
        if (cfg_reach(g, j, k)) CHECK(deps[0].ctrl_isb.count({i, k}) == 1);
    }
    for (auto [i, j] : deps[0].addr) {
      CHECK(p.threads[0].code[i].reads_memory());
      CHECK(p.threads[0].code[j].is_access());
    }
    for (auto [i, j] : deps[0].data) {
      CHECK(p.threads[0].code[i].reads_memory());
      CHECK(p.threads[0].code[j].writes_memory());
    }
  }
}
