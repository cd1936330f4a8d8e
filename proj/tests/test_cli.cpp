#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "remap/cli.hpp"

using namespace remap;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(CORPUS_DIR) + "/../golden/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("behaviors output is exact and deterministic") {
  auto r1 = run({"behaviors", "--model", "x86", corpus("sb.lit")});
  CHECK(r1.code == 0);
  CHECK(r1.out ==
        "P0:r1=0 P1:r2=0 | X=1 Y=1\n"
        "P0:r1=0 P1:r2=1 | X=1 Y=1\n"
        "P0:r1=1 P1:r2=0 | X=1 Y=1\n"
        "P0:r1=1 P1:r2=1 | X=1 Y=1\n"
        "outcome: allowed\n");
  auto r2 = run({"behaviors", "--model", "x86", corpus("sb.lit")});
  CHECK(r1.out == r2.out);

  auto sc = run({"behaviors", "--model", "sc", corpus("sb.lit")});
  CHECK(sc.out.find("P0:r1=0 P1:r2=0") == std::string::npos);
  CHECK(sc.out.find("outcome: forbidden") != std::string::npos);
}

TEST_CASE("check exit codes") {
  CHECK(run({"check", "--model", "x86", corpus("sb.lit")}).code == 0);
  CHECK(run({"check", "--model", "sc", corpus("sb.lit")}).code == 2);
  CHECK(run({"check", "--model", "armv8", corpus("sb.lit")}).code == 64);  // wrong arch
  CHECK(run({"check", "--model", "nope", corpus("sb.lit")}).code == 64);
}

TEST_CASE("map prints the translated program") {
  auto r = run({"map", "--from", "x86", "--to", "armv8", corpus("sb.lit")});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "arch armv8\n"
        "init X=0 Y=0\n"
        "thread P0 {\n"
        "  dmbst;\n"
        "  X = 1;\n"
        "  r1 = Y;\n"
        "  dmbld;\n"
        "}\n"
        "thread P1 {\n"
        "  dmbst;\n"
        "  Y = 1;\n"
        "  r2 = X;\n"
        "  dmbld;\n"
        "}\n"
        "exists ((P0:r1=0 /\\ P1:r2=0))\n");
}

TEST_CASE("verify-mapping distinguishes sound and broken schemes") {
  auto ok = run({"verify-mapping", "--from", "x86", "--to", "armv8", corpus("rmw_lead.lit")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "sound\n");

  auto bad =
      run({"verify-mapping", "--scheme", "rmw-no-leading", corpus("rmw_lead.lit")});
  CHECK(bad.code == 2);
  CHECK(bad.out.find("unsound") == 0);
  CHECK(bad.out.find("witness: P0:a=0 P1:b=0") != std::string::npos);

  auto mca = run({"verify-mapping", "--scheme", "broken-ldr", "--json",
                  corpus("data_coi_v8.lit")});
  CHECK(mca.code == 2);
  auto doc = nlohmann::json::parse(mca.out);
  CHECK(doc["sound"] == false);
  CHECK(doc["scheme"] == "broken-ldr");
}

TEST_CASE("fence-elim prints a ledger and the program") {
  Program p = parse("arch x86\nthread P0 { X = 1; mfence; r = Y; mfence; }");
  std::string path = std::string(CORPUS_DIR) + "/../golden/tmp_felim.lit";
  {
    std::ofstream out(path);
    out << emit(p);
  }
  auto r = run({"fence-elim", path});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "thread P0:\n"
        "  kept fence @1 covering (0, 2)\n"
        "  deleted fence @3\n"
        "arch x86\n"
        "init X=0 Y=0\n"
        "thread P0 {\n"
        "  X = 1;\n"
        "  mfence;\n"
        "  r = Y;\n"
        "}\n");
  std::remove(path.c_str());
}

TEST_CASE("robust exit codes and enforcement output") {
  CHECK(run({"robust", "--m", "sc", "--k", "x86a", corpus("sb_funcs_mfence_x86.lit")}).code == 0);
  auto bad = run({"robust", "--m", "sc", "--k", "x86a", corpus("sb_funcs_bare_x86.lit")});
  CHECK(bad.code == 2);
  CHECK(bad.out.find("not robust") == 0);
  CHECK(bad.out.find("unordered pair") != std::string::npos);

  auto fixed =
      run({"robust", "--m", "sc", "--k", "x86a", "--enforce", corpus("sb_funcs_bare_x86.lit")});
  CHECK(fixed.code == 3);
  CHECK(fixed.out.find("inserted mfence") != std::string::npos);
  CHECK(fixed.out.find("arch x86") != std::string::npos);

  auto json_rep = run({"robust", "--m", "sc", "--k", "x86a", "--json",
                       corpus("dekker_sc_x86.lit")});
  auto doc = nlohmann::json::parse(json_rep.out);
  CHECK(doc["robust"] == false);
  CHECK(doc["offending"].size() == 2);
}

TEST_CASE("corpus run matches the golden summary") {
  auto r = run({"corpus", "run", std::string(CORPUS_DIR)});
  CHECK(r.code == 0);
  CHECK(r.out == golden("corpus_summary.txt"));
}

TEST_CASE("usage errors exit 64") {
  CHECK(run({}).code == 64);
  CHECK(run({"behaviors", corpus("sb.lit")}).code == 64);       // missing --model
  CHECK(run({"map", corpus("sb.lit")}).code == 64);             // no scheme selection
  CHECK(run({"corpus"}).code == 64);                            // missing run
  CHECK(run({"robust", "--m", "armv8", "--k", "x86a", corpus("sb.lit")}).code == 64);
  CHECK(run({"behaviors", "--model", "x86", "/nonexistent.lit"}).code == 64);
}

TEST_CASE("budget flags reach the enumerator") {
  auto r = run({"behaviors", "--model", "x86", "--max-candidates", "1", corpus("sb.lit")});
  CHECK(r.code == 1);
  CHECK(r.err.find("budget") != std::string::npos);
}
