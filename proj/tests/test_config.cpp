#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "catprobe/config.hpp"

using namespace catprobe;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& body) {
    char tmpl[] = "/tmp/catprobe_cfg_XXXXXX";
    const int fd = mkstemp(tmpl);
    REQUIRE(fd >= 0);
    close(fd);
    path = tmpl;
    std::ofstream out(path);
    out << body;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config file parsing with comments and whitespace") {
  TempFile f(
      "# comment line\n"
      "mode = state\n"
      "j = 50   # inline comment\n"
      "t = 1e-6\n"
      "y = 5e-4\n"
      "eta = 0.9\n");
  const auto spec = load_spec(f.path, {});
  CHECK(spec.mode == Mode::state);
  CHECK(spec.params.big_j == 50.0);
  CHECK(spec.t == 1e-6);
  CHECK(spec.y == 5e-4);
  CHECK(spec.params.eta == 0.9);
}

TEST_CASE("command-line overrides win over the config file") {
  TempFile f("j = 50\n");
  const auto spec = load_spec(f.path, {"j=10"});
  CHECK(spec.params.big_j == 10.0);
}

TEST_CASE("unknown keys are rejected with their location") {
  TempFile f("jay = 50\n");
  try {
    load_spec(f.path, {});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("jay") != std::string::npos);
    CHECK(msg.find(":1") != std::string::npos);
  }
  CHECK_THROWS_AS(load_spec(std::nullopt, {"frobnicate=1"}), UsageError);
  CHECK_THROWS_AS(load_spec(std::nullopt, {"eta"}), UsageError);
  CHECK_THROWS_AS(load_spec(std::nullopt, {"eta=abc"}), UsageError);
}

TEST_CASE("missing required fields are reported by name") {
  auto spec = load_spec(std::nullopt, {"mode=state"});
  try {
    require_t(spec);
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("'t'") != std::string::npos);
  }
}

TEST_CASE("the built-in preset expands to the published constants") {
  const auto spec = load_spec(std::nullopt, {"preset=reichel"});
  CHECK(spec.params.g == Approx(mhz_2pi(215.0)));
  CHECK(spec.params.delta == Approx(ghz_2pi(10.0)));
  CHECK(spec.params.kappa1 == Approx(mhz_2pi(106.0)));
  CHECK(spec.params.drive_ratio() == Approx(0.01));
  CHECK(spec.params.big_j == 100.0);
  CHECK_THROWS_AS(load_spec(std::nullopt, {"preset=unknown"}), UsageError);
}

TEST_CASE("frequency keys convert from the 2pi MHz convention") {
  const auto spec = load_spec(std::nullopt, {"g_2pi_mhz=215", "kappa1_2pi_mhz=106"});
  CHECK(spec.params.g == Approx(two_pi * 215e6));
  CHECK(spec.params.kappa1 == Approx(two_pi * 106e6));
}

TEST_CASE("squeezing can be given relative to the cavity-2 rate") {
  const auto spec = load_spec(
      std::nullopt, {"kappa2_2pi_mhz=106", "epsilon_im_over_kappa2=0.025"});
  CHECK(spec.params.epsilon.imag() == Approx(0.025 * mhz_2pi(106.0)));
  CHECK(spec.params.epsilon.real() == 0.0);
}

TEST_CASE("drive ratio sets a real amplitude") {
  const auto spec = load_spec(std::nullopt, {"drive_ratio=0.01"});
  CHECK(spec.params.drive_ratio() == Approx(0.01).epsilon(1e-12));
  CHECK(spec.params.beta.imag() == 0.0);
}
