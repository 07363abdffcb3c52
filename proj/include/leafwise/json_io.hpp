#pragma once

// JSON (de)serialization for every value the command line reads or writes,
// CSV emitters for the plot-ready tables, and the input digests used by run
// manifests. Parsing failures throw SchemaError carrying a JSON-pointer-style
// path to the offending field.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "leafwise/circle.hpp"
#include "leafwise/cohomeq.hpp"
#include "leafwise/diophantine.hpp"
#include "leafwise/fourier.hpp"
#include "leafwise/liealg.hpp"
#include "leafwise/refs.hpp"
#include "leafwise/suspension.hpp"

namespace leafwise {
namespace io {

using nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// ---- core values ----

json series_to_json(const FourierSeries& f);
FourierSeries series_from_json(const json& j, const std::string& at = "$");

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& at = "$");

json algebra_to_json(const LieAlgebra& alg);
LieAlgebra algebra_from_json(const json& j, const std::string& at = "$");

json suspension_to_json(const SuspensionData& s);
SuspensionData suspension_from_json(const json& j, const std::string& at = "$");

json circle_map_to_json(const CircleMap& f);
CircleMap circle_map_from_json(const json& j, const std::string& at = "$");

json one_form_to_json(const LeafwiseOneForm& w);
LeafwiseOneForm one_form_from_json(const json& j, const std::string& at = "$");

// ---- reports ----

json solve_report_to_json(const SolveReport& r);
json diophantine_report_to_json(const DiophantineReport& r);
json cohomology_to_json(const CohomologyDims& c);
json mv_to_json(const MvDimension& m);
json toral_to_json(const ToralReport& t);
json equivalence_to_json(const EquivalenceReport& e);
json obstruction_to_json(const ObstructionSpace& o);
json rigidity_to_json(const RigidityReport& r);
json rotation_to_json(const RotationNumberResult& r);
json moser_to_json(const MoserReport& m);
json kam_to_json(const KamReport& k);
json linearized_to_json(const LinearizedReport& r);
json gauge_to_json(const GaugeReport& g);
json reference_to_json(const ReferenceEntry& e);

// ---- CSV tables (17 significant digits, '.' decimal, '\n' line ends) ----

std::string format_double(double v);  // %.17g
std::string offenders_csv(const DiophantineReport& r);
std::string obstruction_csv(const ObstructionSpace& o);
std::string residual_table_csv(const std::vector<ModeResidual>& rows);
std::string kam_steps_csv(const KamReport& k);
std::string moser_csv(const MoserReport& m);

// ---- digests ----

// FNV-1a 64-bit over the raw bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace io
}  // namespace leafwise
