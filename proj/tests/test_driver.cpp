#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "residua/driver.hpp"
#include "test_util.hpp"

using namespace residua;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           fs::path("residua_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int n = 0;
    return n++;
  }
  std::string file(const std::string& name, const std::string& content) {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("happy path: emit both, files land in the output directory") {
  TempDir tmp;
  tmp.file("main.f",
           "PROGRAM MAIN\nINTEGER MODE, Y\nREAD *, MODE\nMODE = 2\n"
           "IF (MODE .EQ. 2) THEN\nY = 1\nELSE\nY = 2\nEND IF\nPRINT *, Y\nEND\n");
  std::string pec = tmp.file("app.pec", "# nothing pinned\n");
  std::string outdir = (tmp.path / "out").string();

  RunConfig config;
  config.sources = {tmp.path.string()};
  config.constraints_path = pec;
  config.emit = "both";
  config.out_dir = outdir;
  config.trials = 50;

  std::ostringstream out, err;
  int rc = run_pipeline(config, out, err);
  INFO(err.str());
  CHECK(rc == kExitOk);
  CHECK(fs::exists(fs::path(outdir) / "MAIN.f"));
  CHECK(fs::exists(fs::path(outdir) / "report.json"));
  CHECK(fs::exists(fs::path(outdir) / "index.html"));
  CHECK(fs::exists(fs::path(outdir) / "MAIN.html"));
  CHECK(out.str().find("verified") != std::string::npos);

  // the emitted residual reparses through the frontend
  auto emitted = testutil::slurp((fs::path(outdir) / "MAIN.f").string());
  CHECK_NOTHROW(testutil::compile({{"MAIN.f", emitted}}));
}

TEST_CASE("missing constraint file exits 2 with a diagnostic") {
  TempDir tmp;
  tmp.file("main.f", "PROGRAM MAIN\nINTEGER X\nX = 1\nPRINT *, X\nEND\n");
  RunConfig config;
  config.sources = {tmp.path.string()};
  config.constraints_path = (tmp.path / "nope.pec").string();
  config.out_dir = (tmp.path / "out").string();
  std::ostringstream out, err;
  CHECK(run_pipeline(config, out, err) == kExitInputError);
  CHECK(err.str().find("nope.pec") != std::string::npos);
}

TEST_CASE("source errors exit 2 with file:line:col diagnostics") {
  TempDir tmp;
  tmp.file("main.f", "PROGRAM MAIN\nX = 1\nEND\n");
  RunConfig config;
  config.sources = {tmp.path.string()};
  config.out_dir = (tmp.path / "out").string();
  std::ostringstream out, err;
  CHECK(run_pipeline(config, out, err) == kExitInputError);
  CHECK(err.str().find("main.f:2") != std::string::npos);
  CHECK(err.str().find("UndeclaredVariable") != std::string::npos);
}

TEST_CASE("verification failure blocks emission and exits 1") {
  TempDir tmp;
  tmp.file("main.f",
           "PROGRAM MAIN\nINTEGER X, Y\nREAD *, X\nY = 1\nPRINT *, X + Y\nEND\n");
  std::string outdir = (tmp.path / "out").string();
  RunConfig config;
  config.sources = {tmp.path.string()};
  config.emit = "program";
  config.out_dir = outdir;
  config.trials = 20;
  config.policy = "none";  // keeps Y = 1 in the residual
  // corrupt the residual Y = 1 assignment before the gate
  config.debug_mutate = 1;

  std::ostringstream out, err;
  int rc = run_pipeline(config, out, err);
  CHECK(rc == kExitVerifyFailed);
  CHECK(err.str().find("verification failed") != std::string::npos);
  CHECK(err.str().find("counterexample") != std::string::npos);
  CHECK_FALSE(fs::exists(fs::path(outdir) / "MAIN.f"));

  // --unchecked skips the gate
  config.unchecked = true;
  std::ostringstream out2, err2;
  CHECK(run_pipeline(config, out2, err2) == kExitOk);
  CHECK(fs::exists(fs::path(outdir) / "MAIN.f"));
}

TEST_CASE("emitted outputs are byte-deterministic") {
  TempDir tmp;
  tmp.file("main.f",
           "PROGRAM MAIN\nINTEGER K, Y\nREAD *, K\nIF (K .EQ. 1) THEN\nY = 1\n"
           "ELSE\nY = 2\nEND IF\nPRINT *, Y\nEND\n");
  RunConfig config;
  config.sources = {tmp.path.string()};
  config.emit = "both";
  config.trials = 30;

  config.out_dir = (tmp.path / "out1").string();
  std::ostringstream o1, e1;
  REQUIRE(run_pipeline(config, o1, e1) == kExitOk);
  config.out_dir = (tmp.path / "out2").string();
  std::ostringstream o2, e2;
  REQUIRE(run_pipeline(config, o2, e2) == kExitOk);

  for (const char* name : {"MAIN.f", "report.json", "index.html", "MAIN.html"}) {
    auto a = testutil::slurp((fs::path(tmp.path) / "out1" / name).string());
    auto b = testutil::slurp((fs::path(tmp.path) / "out2" / name).string());
    CHECK(a == b);
  }
}

TEST_CASE("keep-list policy file drives the keep-list") {
  TempDir tmp;
  tmp.file("main.f",
           "PROGRAM MAIN\nREAL R, AREA\nPARAMETER (PI = 3.14159)\nREAD *, R\n"
           "AREA = 2.0 * PI * R\nPRINT *, AREA\nEND\n");
  std::string keep = tmp.file("keep.txt", "# identifiers to keep\nAREA\n");
  RunConfig config;
  config.sources = {tmp.path.string()};
  config.policy = "keep:" + keep;
  config.emit = "program";
  config.out_dir = (tmp.path / "out").string();
  config.trials = 30;
  std::ostringstream out, err;
  REQUIRE(run_pipeline(config, out, err) == kExitOk);
  auto text = testutil::slurp((fs::path(tmp.path) / "out" / "MAIN.f").string());
  CHECK(text.find("PI") != std::string::npos);

  // bad policy string
  config.policy = "sometimes";
  std::ostringstream o2, e2;
  CHECK(run_pipeline(config, o2, e2) == kExitInputError);
}
