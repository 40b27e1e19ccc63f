#include "lab.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

using olb::lab::main_with_args;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = main_with_args(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("lab") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"optimize", "--family", "torus"}).code == 2);
    CHECK(run({"optimize", "--family", "box", "--eps", "0.1"}).code == 2);
    CHECK(run({"optimize", "--family", "box", "--eps", "2^-6", "--M", "3"}).code == 2);
    CHECK(run({"sgp", "--format", "xml"}).code == 2);
    CHECK(run({"sgp", "--trials", "abc"}).code == 2);
    CHECK(run({"optimize", "--family", "lp", "--p", "0.5"}).code == 2);
    CHECK(run({"optimize", "--family", "lp", "--n", "3", "--eps", "1/16"}).code == 2);
    CHECK(run({"sgp", "--config", "/nonexistent.json"}).code == 2);
  }

  TEST_CASE("documented outputs") {
    const auto pack = run({"packing", "--family", "box", "--n", "2", "--M", "3"});
    CHECK(pack.code == 0);
    CHECK(pack.out.rfind("pass, 64 instances", 0) == 0);
    const auto scale = run({"scaling", "--family", "box", "--trials", "5"});
    CHECK(scale.code == 0);
    CHECK(lines(scale.out) == 13);
    const auto opt = run({"optimize", "--family", "lp", "--p", "2", "--eps", "1/16", "--trials", "5", "--format", "json"});
    CHECK(opt.code == 0);
    const auto j = nlohmann::json::parse(opt.out);
    CHECK(j["summary"]["bound"].get<double>() == 127.0);
    CHECK(j["summary"]["M"].get<std::size_t>() == 255);
  }

  TEST_CASE("same config and seed give identical output") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"sgp", "--M", "20", "--trials", "50", "--seed", "9"},
             {"optimize", "--family", "box", "--algo", "random", "--trials", "4", "--budget", "50"},
             {"audit", "--family", "perturbed-lp", "--trials", "5", "--format", "json"},
             {"emulation-check", "--family", "lp", "--trials", "50"}}) {
      const auto a = run(args);
      const auto b = run(args);
      CHECK(a.code == 0);
      CHECK(a.out == b.out);
      auto threaded = args;
      threaded.insert(threaded.end(), {"--jobs", "3"});
      CHECK(run(threaded).out == a.out);
    }
  }

  TEST_CASE("config file supplies defaults and flags win") {
    const std::string path = "lab_test_config.json";
    {
      std::ofstream f(path);
      f << R"({"M": 12, "trials": 30, "seed": 4, "format": "json"})";
    }
    const auto from_file = run({"sgp", "--config", path});
    const auto overridden = run({"sgp", "--config", path, "--M", "14"});
    std::remove(path.c_str());
    REQUIRE(from_file.code == 0);
    const auto a = nlohmann::json::parse(from_file.out);
    const auto b = nlohmann::json::parse(overridden.out);
    CHECK(a["results"][0]["M"] == 12);
    CHECK(a["results"][0]["trials"] == 30);
    CHECK(b["results"][0]["M"] == 14);
  }

  TEST_CASE("numbers accept fractions, powers and decimals") {
    CHECK(olb::lab::parse_real("1/16") == 0.0625);
    CHECK(olb::lab::parse_real("2^-3") == 0.125);
    CHECK(olb::lab::parse_real("0.1") == 0.1);
    CHECK(olb::lab::parse_real("1e-6") == 1e-6);
    CHECK_THROWS_AS(olb::lab::parse_real("x"), olb::lab::UsageError);
  }
}

TEST_SUITE("lab") {
  TEST_CASE("sgp audit events match the csv ledger") {
    const std::string path = "lab_sgp_events_test.jsonl";
    const auto res = run({"audit", "--family", "sgp", "--M", "6", "--trials", "7", "--seed", "4", "--format", "csv",
                          "--events", path});
    CHECK(res.code == 0);
    std::ifstream f(path);
    std::size_t n = 0;
    for (std::string line; std::getline(f, line); ++n) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("trial"));
      CHECK(j["H_before"].get<double>() - j["H_after"].get<double>() == doctest::Approx(j["K"].get<double>()));
    }
    CHECK(n == lines(res.out) - 1);
    std::remove(path.c_str());
  }
}
