#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "isofun/core.hpp"
#include "isofun/io.hpp"
#include "isofun/parse.hpp"

using namespace isofun;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("function-spec grammar") {
  SECTION("built-in names") {
    REQUIRE(parse_function_spec("p2", 3).name() == "p2");
    REQUIRE(parse_function_spec("s3", 3).cone().kind == DomainCone::Kind::GammaK);
    REQUIRE(parse_function_spec("q2", 3).cone().k == 1);
    REQUIRE(parse_function_spec("ratio:3:1", 3).cone().kind == DomainCone::Kind::GammaPlus);
  }
  SECTION("inverse transform wrapper") {
    const auto spec = parse_function_spec("inv:q2", 3);
    REQUIRE(spec.is_inverse());
    REQUIRE(spec.name() == "inv:q2");
    REQUIRE(spec.cone().kind == DomainCone::Kind::GammaPlus);
  }
  SECTION("psi prefix expressions") {
    // (P1*P1 - P2) / 2: the two-variable s2
    const auto spec = parse_function_spec("psi:/ - * P1 P1 P2 2", 2);
    const double kappa[] = {2.0, 3.0};
    REQUIRE_THAT(spec.value(kappa), WithinAbs(6.0, 1e-13));

    const auto loss = parse_function_spec("psi:pow abs P2 1.5", 2);
    const double at[] = {1.0, -1.0};  // power sums (p1, p2) = (0, 2)
    REQUIRE_THAT(loss.value(at), WithinRel(std::pow(2.0, 1.5), 1e-13));
  }
  SECTION("rejects malformed input") {
    REQUIRE_THROWS_AS(parse_function_spec("psi:+ P1", 2), ParseError);        // missing operand
    REQUIRE_THROWS_AS(parse_function_spec("psi:P1 P2", 2), ParseError);       // trailing tokens
    REQUIRE_THROWS_AS(parse_function_spec("psi:pow P1 P2", 2), ParseError);   // exponent must be a literal
    REQUIRE_THROWS_AS(parse_function_spec("psi:P0", 2), ParseError);
    REQUIRE_THROWS_AS(parse_function_spec("psi:foo", 2), ParseError);
    REQUIRE_THROWS_AS(parse_function_spec("r2", 2), ParseError);
    REQUIRE_THROWS_AS(parse_function_spec("ratio:2", 2), ParseError);
    REQUIRE_THROWS_AS(parse_function_spec("q9", 2), Error);  // index out of range for n = 2
  }
}

TEST_CASE("cone names") {
  REQUIRE(parse_cone("full", 3).kind == DomainCone::Kind::Full);
  REQUIRE(parse_cone("gplus", 3).kind == DomainCone::Kind::GammaPlus);
  REQUIRE(parse_cone("gk:2", 3).k == 2);
  REQUIRE_THROWS_AS(parse_cone("gk:4", 3), ParseError);
  REQUIRE_THROWS_AS(parse_cone("positive", 3), ParseError);
}

TEST_CASE("matrix JSON round trip") {
  const SquareMatrix a{{2, 1}, {0, 3}};
  const nlohmann::json j = matrix_to_json(a);
  const SquareMatrix back = matrix_from_json(j);
  REQUIRE(back.dim() == 2);
  for (int i = 0; i < 2; ++i)
    for (int jj = 0; jj < 2; ++jj) REQUIRE(back(i, jj) == a(i, jj));

  REQUIRE_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1,2],[3]]")), ParseError);
  REQUIRE_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1,2],[3,\"x\"]]")), ParseError);
  REQUIRE_THROWS_AS(matrix_from_json(nlohmann::json::parse("42")), ParseError);
  REQUIRE_THROWS_AS(matrix_from_json(nlohmann::json::parse("[]")), ParseError);
}

TEST_CASE("matrix file loading") {
  const auto path = std::filesystem::temp_directory_path() / "isofun_test_matrix.json";
  {
    std::ofstream out(path);
    out << "[[2, 1], [0, 3]]";
  }
  const SquareMatrix a = load_matrix_file(path);
  REQUIRE(a(0, 0) == 2.0);
  REQUIRE(a(1, 1) == 3.0);
  std::filesystem::remove(path);

  REQUIRE_THROWS_AS(load_matrix_file("/nonexistent/matrix.json"), ParseError);
}

TEST_CASE("17-digit formatting") {
  REQUIRE(format_sig17(0.0) == "0");
  REQUIRE(format_sig17(1.0) == "1");
  const std::string third = format_sig17(1.0 / 3.0);
  REQUIRE(third.substr(0, 5) == "0.333");
  REQUIRE(third.size() >= 17);
  // round trip: the printed value parses back to the same double
  REQUIRE(std::stod(format_sig17(0.1)) == 0.1);
  REQUIRE(std::stod(format_sig17(-1.2345678912345678e-7)) == -1.2345678912345678e-7);
}

TEST_CASE("report serialization") {
  PropertyReport r;
  r.property = "grad";
  r.pass = true;
  r.samples_run = 100;
  r.worst_violation = 1.25e-9;
  r.tolerance = 1e-6;

  PropertyReport failing;
  failing.property = "concave";
  failing.pass = false;
  failing.samples_run = 7;
  failing.worst_violation = 0.5;
  failing.tolerance = 1e-10;
  Counterexample ce;
  ce.function = "p2";
  ce.matrices.emplace_back("A", SquareMatrix{{1, 0}, {0, 2}});
  ce.values.emplace_back("d2F", 0.5);
  failing.counterexample = ce;

  const FunctionReport rows[] = {{"q2", r}, {"p2", failing}};

  SECTION("csv has the pinned header and one row per report") {
    const std::string csv = reports_to_csv(rows);
    REQUIRE(csv.rfind("function,property,pass,worst_violation,samples_run\n", 0) == 0);
    REQUIRE(csv.find("q2,grad,true,1.25e-09,100") != std::string::npos);
    REQUIRE(csv.find("p2,concave,false,0.5,7") != std::string::npos);
  }
  SECTION("json round trips through the parser") {
    const std::string json = reports_to_json(rows);
    const auto parsed = reports_from_json_text(json);
    REQUIRE(parsed.size() == 2);
    REQUIRE(parsed[0].function == "q2");
    REQUIRE(parsed[0].report.property == "grad");
    REQUIRE(parsed[0].report.pass);
    REQUIRE(parsed[0].report.samples_run == 100);
    REQUIRE(parsed[0].report.worst_violation == 1.25e-9);
    REQUIRE(parsed[1].function == "p2");
    REQUIRE_FALSE(parsed[1].report.pass);
  }
  SECTION("counterexample payload appears in the json") {
    const std::string json = reports_to_json(rows);
    REQUIRE(json.find("\"counterexample\"") != std::string::npos);
    REQUIRE(json.find("\"A\":[[1,0],[0,2]]") != std::string::npos);
  }
  SECTION("malformed report text is rejected") {
    REQUIRE_THROWS_AS(reports_from_json_text("not json"), ParseError);
    REQUIRE_THROWS_AS(reports_from_json_text("{}"), ParseError);
    REQUIRE_THROWS_AS(reports_from_json_text("[{\"property\": \"grad\"}]"), ParseError);
  }
}
