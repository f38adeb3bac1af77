#pragma once

// JSON and CSV export. Every top-level JSON document carries schema_version.

#include <ostream>

#include <json.hpp>

#include "twistk/heat.hpp"
#include "twistk/spectral.hpp"
#include "twistk/torus_ktheory.hpp"

namespace twistk {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json document(const std::string& kind);
std::string dump(const Json& j);

Json to_json(const AbelianGroup& g);
Json to_json(const KGroupResult& r);
Json to_json(const FlowResult& r);
Json to_json(const LocalizationStats& s);
Json to_json(const CharacterClass& c);
Json to_json(const Coset& c);
Json to_json(const RelationReport& r);
Json to_json(const TruncationParams& t);

// Columns t, [s,] phi, value.
void write_density_csv(std::ostream& os, const DensitySample& d, bool header = true);
void write_crossings_csv(std::ostream& os, const FlowResult& r);
// One row per (parameter, eigenvalue index, value).
void write_spectra_csv(std::ostream& os, const std::vector<double>& params, const std::vector<Eigen::VectorXd>& spectra);
// Basis labels and nonzero entries of an exact operator, for debugging.
Json operator_json(const FockBasis& basis, const ExactMatrix& m);

}  // namespace twistk
