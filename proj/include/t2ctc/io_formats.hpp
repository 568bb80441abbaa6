#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "t2ctc/control.hpp"
#include "t2ctc/fls.hpp"
#include "t2ctc/robot.hpp"
#include "t2ctc/type_reduction.hpp"

namespace t2ctc {

// Insertion-ordered so written files read in the order fields are assembled;
// serialization stays deterministic either way.
using Json = nlohmann::ordered_json;

// Membership functions carry a "kind" tag: gaussian {mean, sigma},
// triangular {left, peak, right}, interval {lo, hi}, singleton {point},
// sampled {domain, grades}.
Json mf_to_json(const MembershipFunctionT1& mf);
MembershipFunctionT1 mf_from_json(const Json& j);

// Interval type-2 sets serialize their parametric form:
// {kind:"it2-gaussian-umean", m1, m2, sigma} or
// {kind:"it2-gaussian-usigma", m, sigma1, sigma2}. Sets built from raw
// bounds use {kind:"it2-bounds", lower, upper}.
Json it2_to_json(const IT2Set& set);
IT2Set it2_from_json(const Json& j);

Json rulebase_to_json(const RuleBase& rb);
RuleBase rulebase_from_json(const Json& j);  // validates structure on load

// One file per estimated element, named after estimator_names. Loading
// checks that all 18 bases share byte-identical input variables, since the
// controller evaluates the grade table once per step for the whole bank.
void save_estimators(const EstimatorBank& bank,
                     const std::filesystem::path& dir);
EstimatorBank load_estimators(const std::filesystem::path& dir);

Json training_report_to_json(const TrainingReport& report);

Json robot_params_to_json(const RobotParams& p);
RobotParams robot_params_from_json(const Json& j);

// Generalized centroid inputs for the reduce command: values and weights are
// arrays of membership functions plus the t-norm name.
Json centroid_input_to_json(const GeneralizedCentroidInput& input);
GeneralizedCentroidInput centroid_input_from_json(const Json& j);

// Per-step trace table. First line is the schema tag, second the header,
// then one row per control step, numbers printed with %.17g.
inline constexpr const char* trace_schema_tag = "# t2ctc-trace-v1";
const char* trace_csv_header();
void write_trace_csv(std::ostream& out, const std::vector<SimStep>& steps);
// Throws std::runtime_error naming the first violation: missing tag, header
// mismatch, wrong column count, non-numeric cell, or non-increasing time.
void validate_trace_csv(std::istream& in);

// Run summary: {schema, controller, snr_db, seed, sse, mean_loop_us,
// p99_loop_us}. Infinite SNR is written as the string "inf" since JSON has
// no infinity literal.
Json summary_to_json(const std::string& controller, double snr_db,
                     std::uint64_t seed, const SimResult& result);

double snr_from_json(const Json& j);  // accepts numbers or "inf"
Json snr_to_json(double snr_db);

std::string controller_name(ControllerKind kind);
ControllerKind controller_from_name(const std::string& name);

// Read/write helpers that raise std::runtime_error with the path on failure.
Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace t2ctc
