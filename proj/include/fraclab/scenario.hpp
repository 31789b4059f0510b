// Declarative experiment configs, the registry of named built-in
// scenarios, and the diagnostic checks they declare.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fraclab/analysis.hpp"
#include "fraclab/solvers.hpp"

namespace fraclab {

enum class EquationKind { HE, FHE, PME, FDE, Filtration, FPME, PMFP, KPP, FracKPP };

enum class InitialKind { BarenblattSample, Gaussian, Box, TwoBumps, Custom };

struct InitialSpec {
    InitialKind kind = InitialKind::Box;
    double t0 = 1.0;  // sample/start time
    // Custom: piecewise-linear nodes (x, value), zero outside their span
    std::vector<std::pair<double, double>> table;

    bool operator==(const InitialSpec&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;  // one-line statement of the claim checked
    EquationKind equation = EquationKind::PME;
    OperatorSpec op;
    Nonlinearity nonlinearity;
    Grid1D grid{-1.0, 2.0, 128, Geometry::TruncatedLine};
    InitialSpec initial;
    double t_end = 1.0;
    StepControl step;
    std::vector<double> outputs;             // snapshot times, strictly increasing
    std::vector<std::string> diagnostics;    // registered check names

    bool operator==(const Scenario&) const = default;
};

struct CheckResult {
    std::string name;
    double value = 0.0;
    std::string detail;  // target and tolerance, human readable
    bool pass = false;
};

struct RunSummary {
    std::string scenario;
    double wall_seconds = 0.0;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;

    bool passed() const;
};

struct RunOutput {
    RunSummary summary;
    std::vector<Field> fields;  // snapshots at the scenario output times
    std::vector<std::pair<std::string, DiagnosticSeries>> series;
};

// Key-value config text with sections [scenario], [grid], [step],
// [diagnostics]. Serialization uses 17 significant digits and a fixed
// key order, so parse(serialize(sc)) == sc exactly.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& sc);

// Throws std::invalid_argument naming the violated constraint.
void validate_scenario(const Scenario& sc);

// Validates, evolves the declared equation through the output times,
// then evaluates every declared diagnostic (each produces exactly one
// check result; some run their own auxiliary experiments).
RunOutput run_scenario(const Scenario& sc);

const std::vector<Scenario>& builtin_scenarios();
const Scenario& builtin_scenario(const std::string& name);

// Names of all registered diagnostic checks.
std::vector<std::string> known_diagnostics();

// CSV and summary emission, 17 significant digits throughout.
std::string field_csv(const Field& f);
std::string series_csv(const DiagnosticSeries& s);
std::string summary_text(const RunSummary& s);

std::string format_double(double v);  // shortest %.17g form

}  // namespace fraclab
