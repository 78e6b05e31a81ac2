#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nlpme::app {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240607;
    int only = 0;  // run a single criterion when positive
};

CriterionResult criterion_operator_agreement(const AcceptanceOptions& opt);
CriterionResult criterion_calibration(const AcceptanceOptions& opt);
CriterionResult criterion_conservation(const AcceptanceOptions& opt);
CriterionResult criterion_scaling(const AcceptanceOptions& opt);
CriterionResult criterion_front_exponent(const AcceptanceOptions& opt);
CriterionResult criterion_amplitude_law(const AcceptanceOptions& opt);
CriterionResult criterion_barrier_domination(const AcceptanceOptions& opt);
CriterionResult criterion_near_field(const AcceptanceOptions& opt);
CriterionResult criterion_iout_bound(const AcceptanceOptions& opt);
CriterionResult criterion_theory(const AcceptanceOptions& opt);

/// All criteria in order. Each result line is written to `log` as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* log = nullptr);

/// "PASS  5  front exponent  ..." on one line.
std::string format_result(const CriterionResult& r);

}  // namespace nlpme::app
