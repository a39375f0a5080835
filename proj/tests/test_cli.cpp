#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "collapse/cli.hpp"

using namespace collapse;
using namespace collapse::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "collapse-lattice");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("collapse_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("angles") {
    CHECK(parse_angle("0.25") == 0.25);
    CHECK(parse_angle("pi") == doctest::Approx(std::numbers::pi));
    CHECK(parse_angle("pi/6") == doctest::Approx(std::numbers::pi / 6));
    CHECK(parse_angle("4pi/9") == doctest::Approx(4 * std::numbers::pi / 9));
    CHECK(parse_angle("-pi/2") == doctest::Approx(-std::numbers::pi / 2));
    CHECK_THROWS_AS(parse_angle("pie"), ConfigError);
    CHECK_THROWS_AS(parse_angle("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_angle("pi/0"), ConfigError);
  }

  TEST_CASE("initial states") {
    CHECK(parse_initial("vacuum", 2).first.to_string() == "0000");
    CHECK(parse_initial("eigen:0100", 2).first.occupation() == 1);
    const InitialState s = parse_initial("superposition:1000,0010", 2);
    CHECK(s.kind == InitialState::Kind::Superposition);
    CHECK(parse_initial("left-right:2", 3).second.to_string() == "000110");
    CHECK_THROWS_AS(parse_initial("eigen:010", 2), ConfigError);
    CHECK_THROWS_AS(parse_initial("superposition:1000", 2), ConfigError);
    CHECK_THROWS_AS(parse_initial("superposition:1000,1000", 2), ConfigError);
    CHECK_THROWS_AS(parse_initial("left-right:4", 3), ConfigError);
    CHECK_THROWS_AS(parse_initial("cat", 2), ConfigError);
  }

  TEST_CASE("validation errors exit 1") {
    CHECK(invoke({"simulate"}).code == kValidation);  // no X
    CHECK(invoke({"simulate", "--x", "0.5", "--epsilon", "0.5"}).code == kValidation);
    CHECK(invoke({"simulate", "--x", "1.5"}).code == kValidation);
    CHECK(invoke({"simulate", "--x", "0.5", "--n-sites", "13"}).code == kValidation);
    CHECK(invoke({"simulate", "--x", "0.5", "--initial", "eigen:10"}).code == kValidation);
    CHECK(invoke({"decay", "--theta", "pi/6"}).code == kValidation);
    CHECK(invoke({"coarse-grain", "--x", "1"}).code == kValidation);
    CHECK(invoke({"oracle-check", "--x", "0.5", "--n-sites", "4"}).code == kValidation);
    CHECK(invoke({"nonsense"}).code == kValidation);
    CHECK(invoke({}).code == kValidation);
    const Outcome e = invoke({"coarse-grain", "--x", "1"});
    CHECK(e.err.find("--no-renormalise") != std::string::npos);
    CHECK(invoke({"--help"}).code == kOk);
  }

  TEST_CASE("simulate writes reproducible, self-describing outputs") {
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    const std::vector<std::string> args{"simulate", "--n-sites", "4", "--rows", "12",
                                        "--x", "0.3", "--seed", "77"};
    auto with_dir = [&](const std::filesystem::path& d) {
      auto v = args;
      v.push_back("--out-dir");
      v.push_back(d.string());
      return v;
    };
    REQUIRE(invoke(with_dir(a)).code == kOk);
    REQUIRE(invoke(with_dir(b)).code == kOk);
    for (const char* f : {"fi.pgm", "si.pgm", "events.csv"}) {
      CAPTURE(f);
      const std::string x = slurp(a / f);
      CHECK_FALSE(x.empty());
      CHECK(x == slurp(b / f));
      CHECK(x.find("seed = 77") != std::string::npos);
      CHECK(x.find("x = 0.3") != std::string::npos);
    }
    const std::string pgm = slurp(a / "fi.pgm");
    CHECK(pgm.find("\n8 12\n255\n") != std::string::npos);
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
  }

  TEST_CASE("config files load and flags win") {
    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir / "run.ini");
      f << "n-sites = 3\nrows = 4\nx = 0.5\nseed = 9\n";
    }
    const Outcome o = invoke({"simulate", "--config", (dir / "run.ini").string(), "--seed", "10",
                              "--out-dir", (dir / "out").string()});
    REQUIRE(o.code == kOk);
    const std::string csv = slurp(dir / "out" / "events.csv");
    CHECK(csv.find("seed = 10") != std::string::npos);
    CHECK(csv.find("n-sites = 3") != std::string::npos);
    CHECK(csv.find("rows = 4") != std::string::npos);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("oracle-check passes by default and fails with the negative control") {
    const Outcome ok = invoke({"oracle-check", "--x", "0.5", "--runs", "20000", "--tv-max", "0.05",
                               "--channel-runs", "3000"});
    CHECK(ok.code == kOk);
    CHECK(ok.out.find("PASS covariance") != std::string::npos);
    const Outcome bad = invoke({"oracle-check", "--x", "0.5", "--runs", "2000", "--tv-max", "0.2",
                                "--channel-runs", "500", "--inject-misordered"});
    CHECK(bad.code == kCheckFailed);
    CHECK(bad.out.find("FAIL covariance") != std::string::npos);
  }

  TEST_CASE("coarse-grain on the vacuum reports a verdict") {
    const auto dir = scratch("cg");
    const Outcome o = invoke({"coarse-grain", "--x", "0.9", "--n-sites", "4", "--rows", "20",
                              "--min-blocks", "200", "--out-dir", dir.string()});
    REQUIRE(o.code == kOk);
    CHECK(o.out.find("vacuum statistics") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "blocks.csv"));
    CHECK(std::filesystem::exists(dir / "renormalised.pgm"));
    CHECK(slurp(dir / "renormalised.pgm").find("# map: renormalised = ") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "vacuum.csv"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("decay sweep writes its tables") {
    const auto dir = scratch("decay");
    const Outcome o = invoke({"decay", "--n-sites", "2", "--epsilons", "0.5,0.4,0.3", "--seeds", "5",
                              "--out-dir", dir.string()});
    REQUIRE(o.code == kOk);
    CHECK(o.out.find("slope") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "decay_runs.csv"));
    CHECK(std::filesystem::exists(dir / "decay_summary.csv"));
    CHECK(std::filesystem::exists(dir / "decay_fit.csv"));
    std::filesystem::remove_all(dir);
  }
}
