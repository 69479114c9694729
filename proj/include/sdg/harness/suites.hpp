#pragma once

/// @file suites.hpp
/// @brief Named verification suites shared by the CLI and the acceptance run.

#include <iosfwd>
#include <string>
#include <vector>

namespace sdg::harness {

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    std::string relation;  ///< "<", "<=", ">", ">=" between value and limit
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool pass() const;
};

/// "algebra": adjoint transposes, interpolation orthogonality and fault
/// detection on matching and nonmatching Example 1 meshes.
/// "monotone": pointwise monotonicity and continuity margins of A.
/// "infsup": discrete inf-sup constants of b_S and a_S on three levels.
SuiteResult run_suite(const std::string& name);
std::vector<std::string> suite_names();

void write_suite_json(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace sdg::harness
