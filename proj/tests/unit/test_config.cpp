#include <doctest.h>

#include "irgnh/config.hpp"

using namespace irgnh;

namespace {

const char* kInvert = R"(
[problem]
kind = diagonal
n = 16

[method]
name = irgnm
p = 2
r = 2
alpha0 = 2
q = 1.5

[noise]
kind = gaussian
sigma = 1e-3
seed = 9

[output]
directory = somewhere
formats = csv, json
)";

}  // namespace

TEST_CASE("parse a complete invert config") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kInvert);
  CHECK(cfg.problem.kind == ProblemKind::Diagonal);
  CHECK(*cfg.problem.n == 16);
  CHECK(*cfg.method.method == Method::Irgnm);
  CHECK(cfg.method.alpha0 == 2.0);
  CHECK(cfg.noise.kind == NoiseKind::Gaussian);
  CHECK(cfg.noise.seed == 9);
  CHECK(cfg.output.directory == "somewhere");
  CHECK(cfg.output.wants("json"));
  CHECK_FALSE(cfg.output.wants("svg"));
  CHECK_NOTHROW(cfg.validate(Command::Invert));
  CHECK(cfg.schedule().alpha(1) == doctest::Approx(2.0 / 1.5));
  CHECK(cfg.sha256.size() == 64);
}

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("unknown keys and sections are errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[problem]\nsize = 3\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[extras]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("a = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[method]\np = two\n"), ConfigError);
}

TEST_CASE("command-specific requirements") {
  const ExperimentConfig empty = ExperimentConfig::parse("");
  CHECK_THROWS_AS(empty.validate(Command::Forward), ConfigError);  // needs n
  CHECK_NOTHROW(empty.validate(Command::Lemmas));

  ExperimentConfig cfg = ExperimentConfig::parse(kInvert);
  cfg.method.r = 2.5;
  CHECK_THROWS_AS(cfg.validate(Command::Invert), ConfigError);

  const ExperimentConfig no_name = ExperimentConfig::parse("[problem]\nkind = diagonal\nn = 4\n[method]\np = 2\nr = 2\n");
  CHECK_THROWS_AS(no_name.validate(Command::Invert), ConfigError);
  CHECK_NOTHROW(no_name.validate(Command::Rates));

  const ExperimentConfig cmp = ExperimentConfig::parse("[problem]\nn = 15\n[method]\nr = 2\n");
  CHECK_THROWS_AS(cmp.validate(Command::Compare), ConfigError);
}

TEST_CASE("delta grid from count and ratio") {
  const ExperimentConfig cfg = ExperimentConfig::parse("[study]\ncount = 3\nratio = 0.1\ndelta_max = 1e-2\n");
  REQUIRE(cfg.study.deltas.size() == 3);
  CHECK(cfg.study.deltas[2] == doctest::Approx(1e-4));
  CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ncount = 3\n"), ConfigError);
}

TEST_CASE("command names") {
  CHECK(parse_command("rates") == Command::Rates);
  CHECK(to_string(Command::Compare) == "compare");
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
}
