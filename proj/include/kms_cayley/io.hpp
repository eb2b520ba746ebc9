#pragma once

#include "kms_cayley/kms.hpp"
#include "kms_cayley/n_infinity.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace kms {

/// 17 significant digits, trailing zeros kept ("%#.17g"); non-finite
/// values become "null".
std::string format_double(double x);

/// JSON text with every floating-point number printed by format_double.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// "x,y,z" -> vector.
Vec parse_vector(std::string_view text);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const LimitPoint& p, const GroupSpec& spec);

/// {"beta": f, "mixture": [{"w": f, "u": [f...]} | {"w": f, "dihedral_t": f}]}
KmsState state_from_json(const nlohmann::json& j, const GroupSpec& spec);
nlohmann::json state_to_json(const KmsState& state);

}  // namespace kms
