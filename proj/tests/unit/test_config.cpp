#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "../common.hpp"
#include "lagom/config.hpp"

using namespace lagom;
using testing::thrown_kind;

TEST_CASE("key value parsing") {
  std::istringstream in(
      "# profile run\n"
      "kernel.name = compact-1d\n"
      "  profile.B=5   # inline comment\n"
      "profile.M = 1..4\n"
      "\n"
      "kernel.delta = 0.125\n"
      "profile.B = 6\n");
  const auto cfg = Config::parse(in);
  CHECK(cfg.get("kernel.name") == "compact-1d");
  CHECK(cfg.get_int("profile.B") == 6);
  CHECK(cfg.get_real("kernel.delta") == 0.125);
  CHECK_FALSE(cfg.get("missing").has_value());
  CHECK(parse_int_list(*cfg.get("profile.M")) == std::vector<int>{1, 2, 3, 4});
  CHECK(thrown_kind([&] { cfg.get_int("kernel.name"); }) == ErrorKind::Parse);

  std::istringstream bad("no equals sign here\n");
  CHECK(thrown_kind([&] { Config::parse(bad); }) == ErrorKind::Parse);
  CHECK(thrown_kind([] { Config::load("/nonexistent/lagom.cfg"); }) == ErrorKind::Io);
}

TEST_CASE("integer lists") {
  CHECK(parse_int_list("3") == std::vector<int>{3});
  CHECK(parse_int_list("1,2, 5") == std::vector<int>{1, 2, 5});
  CHECK(parse_int_list("2..2") == std::vector<int>{2});
  CHECK(thrown_kind([] { parse_int_list("4..1"); }) == ErrorKind::Parse);
  CHECK(thrown_kind([] { parse_int_list("a,b"); }) == ErrorKind::Parse);
}

TEST_CASE("kernels from config") {
  Config cfg;
  CHECK(kernel_from_config(cfg).name == "compact-1d");
  cfg.set("kernel.name", "compact-2d");
  cfg.set("kernel.delta", "0.125");
  cfg.set("kernel.L", "power-decay:1");
  const auto k = kernel_from_config(cfg);
  CHECK(k.d == 2);
  CHECK(k.delta == 0.125);
  CHECK(k.triple.L.family == AdmissibleFamily::PowerDecay);
  CHECK(k.triple.L.gamma == 1.0);
  CHECK(k.triple.D.to_string() == default_triple().D.to_string());
  cfg.set("kernel.name", "control-1d");
  CHECK(thrown_kind([&] { kernel_from_config(cfg); }) == ErrorKind::InvalidArgument);
}
