#pragma once

#include <string>

#include <json.hpp>

#include "quermass/axisym.hpp"
#include "quermass/conjecture_search.hpp"
#include "quermass/star_domain.hpp"

namespace quermass {

// Field files take one of two forms:
//   {"n", "L", "coeffs": [{"l", "m_index", "value"}], optional "grid_resolution"}
//   {"n", "grid_resolution", "values": [...], optional "L"}
// resolution_override > 0 replaces the grid resolution of the coefficient form.
ScalarField field_from_json(const nlohmann::json& j, int resolution_override = -1);
nlohmann::json field_to_json(const ScalarField& u);

// A field file plus an optional "center": [...].
StarDomain domain_from_json(const nlohmann::json& j, int resolution_override = -1);
nlohmann::json domain_to_json(const StarDomain& K);

// {"n", "theta_nodes", "values"} or {"n", "zonal_coeffs"}; optional "nodes".
AxialProfile axial_from_json(const nlohmann::json& j);
bool is_axial_json(const nlohmann::json& j);

nlohmann::json zonal_to_json(const ZonalField& z);
ZonalField zonal_from_json(const nlohmann::json& j);

nlohmann::json candidate_to_json(const ConjectureCandidate& c);

// Grid resolution used for coefficient-form files without one.
int default_file_resolution(int n, int L);

nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

}  // namespace quermass
