#include "cwac/serialize.hpp"

namespace cwac {

Json to_json(const ClopenSet& s, const BratteliDiagram& d) {
  KRPartition p = kr_partition(d, s.level);
  Json cells = Json::array();
  for (Count i : s.indices()) {
    Cell c = p.cell(i);
    cells.push_back({c.tower, c.floor});
  }
  return {{"level", s.level}, {"cells", cells}};
}

ClopenSet clopen_from_json(const Json& j, const BratteliDiagram& d) {
  std::vector<Cell> cells;
  for (const auto& c : j.at("cells")) cells.push_back({c.at(0).get<int>(), c.at(1).get<Count>()});
  return ClopenSet::of_cells(d, j.at("level").get<int>(), cells);
}

Json to_json(const CellFunction<Count>& f) { return {{"level", f.level}, {"values", f.values}}; }

CellFunction<Count> count_function_from_json(const Json& j) {
  return {j.at("level").get<int>(), j.at("values").get<std::vector<Count>>()};
}

Json to_json(const std::vector<Count>& v) { return Json(v); }

std::vector<Count> counts_from_json(const Json& j) { return j.get<std::vector<Count>>(); }

}  // namespace cwac
