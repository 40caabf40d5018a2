#pragma once

// JSON load/save for query instances.
//
// {
//   "n": 3,
//   "relations": ["A", "B", "C"],
//   "edges": [[0, 1], [1, 2], [0, 2]],
//   "cross_products": true,
//   "cardinalities": [ {"set": [0], "value": 100},
//                      {"set": [0, 1], "value": 1000}, ... ]
// }
//
// Loading refuses anything an optimizer could later trip over: out-of-range
// n, bad indices, duplicate or missing entries, values big enough to reach
// the infinity sentinel.

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

#include "joinconv/costmodel.hpp"

namespace joinconv {

inline QueryInstance query_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw std::runtime_error("query json: missing integer field 'n'");
  int n = j["n"].get<int>();
  if (n < 1 || n > kMaxRelations)
    throw std::runtime_error("query json: n out of range [1, 30]");

  std::vector<std::string> names;
  if (!j.contains("relations"))
    throw std::runtime_error("query json: missing 'relations'");
  for (const auto& name : j["relations"]) names.push_back(name.get<std::string>());

  std::vector<std::pair<int, int>> edges;
  if (j.contains("edges"))
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw std::runtime_error("query json: edge must be an index pair");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }

  bool cross = j.value("cross_products", true);
  QueryInstance q(n, std::move(names), std::move(edges), cross);

  if (!j.contains("cardinalities"))
    throw std::runtime_error("query json: missing 'cardinalities'");
  for (const auto& entry : j["cardinalities"]) {
    if (!entry.contains("set") || !entry.contains("value"))
      throw std::runtime_error("query json: cardinality entry needs set+value");
    std::uint32_t mask = 0;
    for (const auto& idx : entry["set"]) {
      int i = idx.get<int>();
      if (i < 0 || i >= n)
        throw std::runtime_error("query json: set index out of range");
      mask |= std::uint32_t{1} << i;
    }
    if (mask == 0) throw std::runtime_error("query json: empty set entry");
    RelationSet s(mask);
    if (q.has_cardinality(s))
      throw std::runtime_error("query json: duplicate cardinality entry");
    std::int64_t value = entry["value"].get<std::int64_t>();
    if (value < 0) throw std::runtime_error("query json: negative cardinality");
    if (value > ext::kInfinity / (n + 1))
      throw std::runtime_error(
          "query json: cardinality too large for the cost domain");
    q.set_cardinality(s, value);
  }

  // Presence: base sizes for every relation, a join size for every set an
  // optimizer may consult (all of them with cross products, connected ones
  // otherwise).
  for (int i = 0; i < n; ++i)
    if (!q.has_cardinality(RelationSet::singleton(i)))
      throw std::runtime_error("query json: missing base relation size");
  std::uint32_t size = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < size; ++s) {
    RelationSet set(s);
    if (set.count() < 2) continue;
    if (!q.cross_products() && !q.connected(set)) continue;
    if (!q.has_cardinality(set))
      throw std::runtime_error("query json: missing cardinality for a set");
  }
  return q;
}

inline nlohmann::ordered_json query_to_json(const QueryInstance& q) {
  nlohmann::ordered_json j;
  j["n"] = q.n();
  j["relations"] = q.relation_names();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (auto [a, b] : q.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["cross_products"] = q.cross_products();
  nlohmann::ordered_json cards = nlohmann::ordered_json::array();
  std::uint32_t size = std::uint32_t{1} << q.n();
  for (std::uint32_t s = 1; s < size; ++s) {
    RelationSet set(s);
    if (!q.has_cardinality(set)) continue;
    nlohmann::ordered_json entry;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (int i : set.members()) members.push_back(i);
    entry["set"] = std::move(members);
    entry["value"] = q.cardinality(set);
    cards.push_back(std::move(entry));
  }
  j["cardinalities"] = std::move(cards);
  return j;
}

inline QueryInstance load_query(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open query file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("query json parse error: " + std::string(e.what()));
  }
  return query_from_json(j);
}

inline void save_query(const QueryInstance& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << query_to_json(q).dump(2) << "\n";
}

}  // namespace joinconv
