#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "fraclab/scenario.hpp"

using namespace fraclab;

namespace {

Scenario small_scenario() {
    Scenario sc;
    sc.name = "tiny";
    sc.description = "heat flow on a small box";
    sc.equation = EquationKind::HE;
    sc.op = OperatorSpec();
    sc.nonlinearity = Nonlinearity::identity();
    sc.grid = Grid1D(-8.0, 16.0, 64, Geometry::Periodic);
    sc.initial = {InitialKind::Gaussian, 0.5, {}};
    sc.t_end = 2.0;
    sc.outputs = {1.0, 2.0};
    sc.diagnostics = {};
    return sc;
}

std::string thrown_message(const Scenario& sc) {
    try {
        validate_scenario(sc);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("every built-in round-trips through the config text exactly") {
    for (const Scenario& sc : builtin_scenarios()) {
        std::string text = serialize_scenario(sc);
        Scenario back = parse_scenario(text);
        CHECK(back == sc);
        CHECK(serialize_scenario(back) == text);
    }
}

TEST_CASE("built-in registry is consistent") {
    const auto& all = builtin_scenarios();
    CHECK(all.size() == 15);
    std::set<std::string> names;
    auto known = known_diagnostics();
    for (const Scenario& sc : all) {
        CHECK(names.insert(sc.name).second);
        CHECK(!sc.description.empty());
        CHECK(&builtin_scenario(sc.name) == &sc);
        for (const std::string& d : sc.diagnostics)
            CHECK(std::count(known.begin(), known.end(), d) == 1);
    }
    CHECK_THROWS_AS(builtin_scenario("no-such-scenario"), std::invalid_argument);
}

TEST_CASE("parser rejects malformed config text") {
    std::string base = serialize_scenario(small_scenario());
    CHECK_THROWS_AS(parse_scenario(base + "[mystery]\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario(base + "stray_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nm = not-a-number\n[grid]\nleft = 0\nlength = 1\n"
                                   "n = 16\ngeometry = periodic\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nname = x\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("name = orphan\n"), std::invalid_argument);
}

TEST_CASE("parser tolerates comments and blank lines") {
    Scenario sc = small_scenario();
    std::string text = "# leading comment\n\n" + serialize_scenario(sc) + "\n# trailing\n";
    CHECK(parse_scenario(text) == sc);
}

TEST_CASE("validation names the violated rule") {
    Scenario sc = small_scenario();
    sc.t_end = -1.0;
    CHECK(thrown_message(sc).find("t-end-positive") != std::string::npos);

    sc = small_scenario();
    sc.step.h = 0.0;
    CHECK(thrown_message(sc).find("step-positive") != std::string::npos);

    sc = small_scenario();
    sc.step.cfl_safety = 1.5;
    CHECK(thrown_message(sc).find("cfl-range") != std::string::npos);

    sc = small_scenario();
    sc.outputs = {1.0, 1.0};
    CHECK(thrown_message(sc).find("outputs-increasing") != std::string::npos);

    sc = small_scenario();
    sc.outputs = {1.0, 5.0};
    CHECK(thrown_message(sc).find("outputs-within-horizon") != std::string::npos);

    sc = small_scenario();
    sc.diagnostics = {"no-such-check"};
    CHECK(thrown_message(sc).find("unknown-diagnostic") != std::string::npos);

    sc = small_scenario();
    sc.equation = EquationKind::FPME;
    sc.op.kind = OperatorKind::CFL;  // bypass the ctor guard, as a parsed config can
    sc.op.s = 0.3;
    sc.nonlinearity = Nonlinearity::power(2.0);
    sc.grid = Grid1D(-1.0, 2.0, 64, Geometry::DirichletExterior);
    CHECK(thrown_message(sc).find("censored-order") != std::string::npos);

    sc = small_scenario();
    sc.equation = EquationKind::FPME;
    sc.op = OperatorSpec(OperatorKind::RFL, 0.5);
    sc.nonlinearity = Nonlinearity::power(2.0);
    CHECK(thrown_message(sc).find("interval-operator-geometry") != std::string::npos);

    sc = small_scenario();
    sc.op = OperatorSpec(OperatorKind::InverseRiesz, 0.5);
    CHECK(thrown_message(sc).find("inverse-riesz-direct") != std::string::npos);

    sc = small_scenario();
    sc.equation = EquationKind::KPP;
    sc.op = OperatorSpec(OperatorKind::FracSpectral, 0.5);
    CHECK(thrown_message(sc).find("kpp-operator") != std::string::npos);

    sc = small_scenario();
    sc.equation = EquationKind::PME;
    sc.nonlinearity = Nonlinearity::power(0.5);
    sc.grid = Grid1D(-8.0, 16.0, 64, Geometry::TruncatedLine);
    CHECK(thrown_message(sc).find("porous-medium-exponent") != std::string::npos);

    sc = small_scenario();
    sc.initial.kind = InitialKind::Custom;
    sc.initial.table = {{0.0, 1.0}};
    CHECK(thrown_message(sc).find("custom-table") != std::string::npos);

    sc = small_scenario();
    sc.initial.kind = InitialKind::Custom;
    sc.initial.table = {{0.0, 1.0}, {-1.0, 0.0}};
    CHECK(thrown_message(sc).find("custom-table") != std::string::npos);
}

TEST_CASE("runs are deterministic byte for byte") {
    Scenario sc = small_scenario();
    RunOutput a = run_scenario(sc);
    RunOutput b = run_scenario(sc);
    REQUIRE(a.fields.size() == b.fields.size());
    for (size_t i = 0; i < a.fields.size(); ++i)
        CHECK(field_csv(a.fields[i]) == field_csv(b.fields[i]));
    a.summary.wall_seconds = b.summary.wall_seconds = 0.0;
    CHECK(summary_text(a.summary) == summary_text(b.summary));
}

TEST_CASE("a scenario without diagnostics runs and trivially passes") {
    RunOutput out = run_scenario(small_scenario());
    CHECK(out.summary.checks.empty());
    CHECK(out.summary.passed());
    REQUIRE(out.fields.size() == 2);
    CHECK(out.fields[0].time == doctest::Approx(1.0));
    CHECK(out.fields[1].time == doctest::Approx(2.0));
    CHECK(mass(out.fields[0]) == doctest::Approx(mass(out.fields[1])).epsilon(1e-10));
}

TEST_CASE("custom initial data interpolates its table") {
    Scenario sc = small_scenario();
    sc.initial.kind = InitialKind::Custom;
    sc.initial.table = {{-1.0, 0.0}, {0.0, 2.0}, {1.0, 0.0}};
    sc.outputs = {};
    sc.diagnostics = {};
    RunOutput out = run_scenario(sc);
    CHECK(out.fields.empty());
    Grid1D g = sc.grid;
    // mass of the tent sampled on the grid equals the exact integral up
    // to midpoint-rule error
    Field f = [&] {
        Scenario probe = sc;
        probe.outputs = {sc.initial.t0};
        probe.equation = EquationKind::HE;
        return run_scenario(probe).fields[0];
    }();
    CHECK(mass(f) == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("csv emission uses full precision") {
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    DiagnosticSeries s;
    s.add(1.0, 0.1);
    s.add(2.0, 0.2);
    CHECK(series_csv(s) ==
          "time,value\n1,0.10000000000000001\n2,0.20000000000000001\n");
    Grid1D g(0.0, 1.0, 8, Geometry::TruncatedLine);
    Field f(g);
    f[0] = 0.5;
    f[1] = -0.25;
    CHECK(field_csv(f).substr(0, 31) == "x,u\n0.0625,0.5\n0.1875,-0.25\n0.3");
}

TEST_CASE("summary text reports each check and the verdict") {
    RunSummary s;
    s.scenario = "demo";
    s.checks.push_back({"alpha", 1.5, "target 1.5", true});
    s.checks.push_back({"beta", 9.0, "target 0", false});
    s.warnings.push_back("edge decay budget exceeded");
    std::string text = summary_text(s);
    CHECK(text.find("check.alpha.pass = true") != std::string::npos);
    CHECK(text.find("check.beta.pass = false") != std::string::npos);
    CHECK(text.find("warning.0 = edge decay budget exceeded") != std::string::npos);
    CHECK(text.find("passed = false") != std::string::npos);
    CHECK(!s.passed());
}
