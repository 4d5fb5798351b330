#pragma once

#include <json.hpp>

#include "cwac/bratteli.hpp"

namespace cwac {

using Json = nlohmann::ordered_json;

Json to_json(const ClopenSet& s, const BratteliDiagram& d);
ClopenSet clopen_from_json(const Json& j, const BratteliDiagram& d);

Json to_json(const CellFunction<Count>& f);
CellFunction<Count> count_function_from_json(const Json& j);

Json to_json(const std::vector<Count>& v);
std::vector<Count> counts_from_json(const Json& j);

}  // namespace cwac
