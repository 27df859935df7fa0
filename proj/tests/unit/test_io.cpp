#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "fsk/config.hpp"
#include "fsk/error.hpp"
#include "fsk/export.hpp"
#include "fsk/expr.hpp"
#include "fsk/report.hpp"
#include "json.hpp"

using namespace fsk;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FSK_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SampledField reference_field() {
  return sample(SampledField::uniform(kUnitSquare, 5, 5), [](double x, double y) { return x * x - 0.5 * y + x * y; });
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("fsk_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string config_error(const std::string& text, Errc expected = Errc::validation_error) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

const char* kGood = R"json({
  "net": {"n": 2, "m": 2},
  "f": "sin_sin",
  "operator": {"kind": "multiplication", "t": "1 + x*(1-x)*y*(1-y)"},
  "alpha": 0.3
})json";

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("expressions") {
    CHECK(parse_expression("1 + 2 * 3")(0, 0) == 7);
    CHECK(parse_expression("2 ^ 3 ^ 2")(0, 0) == 512);
    CHECK(parse_expression("-2 ^ 2")(0, 0) == -4);
    CHECK(parse_expression("x*(1-x)*y")(0.5, 2) == doctest::Approx(0.5));
    CHECK(parse_expression("sin(pi*x) * cos(y) + sqrt(abs(-4)) - log(exp(1)) + tan(0)")(0.5, 0) ==
          doctest::Approx(2.0));
    CHECK(parse_expression("1e-3 * 2.5E2")(0, 0) == doctest::Approx(0.25));
    const BivariateFn f = parse_expression("x / y").as_function();
    CHECK(f(3, 4) == 0.75);
    CHECK(parse_expression(" x+y ").source() == " x+y ");
    for (const char* bad : {"", "1 +", "sin x", "foo(1)", "(1", "1 2", "x $ y", "z"}) {
      try {
        parse_expression(bad);
        FAIL("accepted " << bad);
      } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
        CHECK(std::string(e.what()).find("column") != std::string::npos);
      }
    }
  }

  TEST_CASE("exports match the independent goldens") {
    const SampledField f = reference_field();
    CHECK(to_csv(f) == slurp(kData / "golden/reference_5x5.csv"));
    CHECK(to_pgm(f) == slurp(kData / "golden/reference_5x5.pgm"));
    CHECK(to_obj(f) == slurp(kData / "golden/reference_5x5.obj"));
    CHECK(parse_export_format("obj") == ExportFormat::obj);
    CHECK_FALSE(parse_export_format("png").has_value());
  }

  TEST_CASE("constant fields render black") {
    const SampledField c = sample(SampledField::uniform(kUnitSquare, 3, 2), [](double, double) { return 4.0; });
    const std::string pgm = to_pgm(c);
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(pgm.size() == header.size() + 12);
    CHECK(pgm.substr(header.size()) == std::string(12, '\0'));
  }

  TEST_CASE("CSV round trip") {
    const fs::path dir = scratch_dir();
    const SampledField f = sample(SampledField::uniform(Rect{-1, 2, 0, 0.3}, 7, 4),
                                  [](double x, double y) { return std::sin(x) / 3 + y * 1e-9; });
    export_field(f, ExportFormat::csv, dir / "f.csv");
    const SampledField g = read_csv_field(dir / "f.csv");
    REQUIRE(g.same_grid(f));
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(g.values()[k] == f.values()[k]);
    CHECK_THROWS_AS(export_field(f, ExportFormat::csv, dir / "missing" / "f.csv"), Error);
    CHECK_THROWS_AS(read_csv_field(dir / "nope.csv"), Error);
    fs::remove_all(dir);
  }

  TEST_CASE("configs parse and build") {
    const ExperimentConfig cfg = parse_config(kGood);
    CHECK(cfg.surface == SurfaceKind::alpha);
    CHECK(cfg.net.n == 2);
    REQUIRE(cfg.alpha.constant.has_value());
    CHECK(*cfg.alpha.constant == 0.3);
    const ExperimentConfig c1 = load_config(kData / "data/case1.json");
    CHECK(c1.solver.grid_res == 257);
    CHECK(c1.analysis.lp == std::vector<double>{1, 2});
    const PerturbOperator op = make_operator(c1.op, kUnitSquare);
    CHECK(op.norms().norm == doctest::Approx(1.0625));
    for (const std::string& name : builtin_names()) {
      FunctionSpec spec;
      spec.text = name;
      CHECK(std::isfinite(make_function(spec)(0.3, 0.4)));
    }
  }

  TEST_CASE("config errors name the offending field") {
    auto with = [](const std::string& key, const std::string& value) {
      nlohmann::json j = nlohmann::json::parse(kGood);
      j[key] = nlohmann::json::parse(value);
      return j.dump();
    };
    CHECK(config_error(with("alpha", "1.5")).find("alpha") != std::string::npos);
    CHECK(config_error(with("alpha", "\"x +\"")).find("alpha") != std::string::npos);
    CHECK(config_error(with("net", R"({"xs": [0, 0.5, 0.4, 1], "ys": [0, 0.5, 1]})")).find("net") !=
          std::string::npos);
    CHECK(config_error(with("net", R"({"n": 1, "m": 2})")).find("net") != std::string::npos);
    CHECK(config_error(with("operator", R"({"kind": "multiplication", "t": "1 + x"})")).find("operator") !=
          std::string::npos);
    CHECK(config_error(with("bogus", "1")).find("bogus") != std::string::npos);
    CHECK(config_error("{not json", Errc::parse_error).size() > 0);
  }

  TEST_CASE("verification report JSON") {
    VerificationReport r("demo");
    r.set_environment("threads", std::int64_t{4});
    r.set_environment("grid", std::string("257"));
    r.add(make_check("a", "bound", 1.0, 2.0, 0.0));
    r.add(make_check("b", "lower", 1.0, 2.0, 0.5, Relation::at_least));
    r.add(make_check("c", "nan", std::nan(""), 1.0, 0.0));
    r.add_timing("solve", 0.25);
    CHECK_FALSE(r.pass());
    CHECK(r.checks()[0].pass);
    CHECK_FALSE(r.checks()[1].pass);
    CHECK_FALSE(r.checks()[2].pass);
    const nlohmann::json j = nlohmann::json::parse(r.to_json());
    CHECK(j["title"] == "demo");
    CHECK(j["pass"] == false);
    CHECK(j["checks"].size() == 3);
    CHECK(j["checks"][2]["lhs"].is_string());
    CHECK(j.contains("timings"));
    CHECK_FALSE(nlohmann::json::parse(r.to_json(false)).contains("timings"));
    CHECK(r.to_json(false) == r.to_json(false));
  }
}
