#include "gpal/model_json.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "json.hpp"

namespace gpal {

namespace {

using nlohmann::json;

// Equivalence classes of a relation, blocks and members both ascending.
std::vector<std::vector<int>> blocks_of(const std::vector<int>& worlds,
                                        const std::set<WorldPair>& rel) {
  std::vector<std::vector<int>> blocks;
  std::set<int> placed;
  for (int w : worlds) {
    if (placed.contains(w)) continue;
    std::vector<int> block;
    for (int v : worlds)
      if (rel.contains({w, v})) {
        block.push_back(v);
        placed.insert(v);
      }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

std::string model_to_json(const KripkeModel& m) {
  // Renumber to 0..n-1 in case the model is a restriction.
  std::map<int, int> index;
  for (int w : m.worlds()) index.emplace(w, static_cast<int>(index.size()));

  json rels = json::object();
  for (const auto& [agent, rel] : m.relations()) {
    json agent_blocks = json::array();
    for (const auto& block : blocks_of(m.worlds(), rel)) {
      json b = json::array();
      for (int w : block) b.push_back(index.at(w));
      agent_blocks.push_back(std::move(b));
    }
    rels[agent.name()] = std::move(agent_blocks);
  }

  json val = json::object();
  for (const auto& [atom, trueset] : m.valuation()) {
    json ws = json::array();
    for (int w : trueset) ws.push_back(index.at(w));
    val[atom.name()] = std::move(ws);
  }

  json out = {{"worlds", m.worlds().size()},
              {"relations", std::move(rels)},
              {"valuation", std::move(val)}};
  return out.dump(2);
}

KripkeModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelJsonError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("worlds") || !doc.contains("relations") ||
      !doc.contains("valuation"))
    throw ModelJsonError("model must have worlds, relations and valuation");
  if (!doc["worlds"].is_number_unsigned() || doc["worlds"].get<long long>() < 1)
    throw ModelJsonError("worlds must be a positive integer");
  const int n = doc["worlds"].get<int>();

  auto world_id = [n](const json& j, const char* where) {
    if (!j.is_number_unsigned() || j.get<long long>() >= n)
      throw ModelJsonError(std::string(where) + ": world ids must lie in [0, worlds)");
    return j.get<int>();
  };

  if (!doc["relations"].is_object()) throw ModelJsonError("relations must be an object");
  std::map<Agent, std::set<WorldPair>> relations;
  for (const auto& [agent_name, blocks] : doc["relations"].items()) {
    if (!blocks.is_array()) throw ModelJsonError("relation must be an array of blocks");
    std::set<int> covered;
    std::set<WorldPair> rel;
    for (const json& block : blocks) {
      if (!block.is_array() || block.empty())
        throw ModelJsonError("each block must be a nonempty array");
      std::vector<int> members;
      for (const json& j : block) members.push_back(world_id(j, "relations"));
      for (int w : members) {
        if (!covered.insert(w).second)
          throw ModelJsonError("blocks for agent '" + agent_name + "' overlap");
        for (int v : members) rel.insert({w, v});
      }
    }
    if (static_cast<int>(covered.size()) != n)
      throw ModelJsonError("blocks for agent '" + agent_name +
                           "' do not cover every world");
    relations.emplace(Agent(agent_name), std::move(rel));
  }

  if (!doc["valuation"].is_object()) throw ModelJsonError("valuation must be an object");
  std::map<Atom, std::set<int>> valuation;
  for (const auto& [atom_name, ws] : doc["valuation"].items()) {
    if (!ws.is_array()) throw ModelJsonError("valuation entries must be arrays");
    std::set<int>& trueset = valuation[Atom(atom_name)];
    for (const json& j : ws) trueset.insert(world_id(j, "valuation"));
  }

  return KripkeModel(n, std::move(relations), std::move(valuation));
}

}  // namespace gpal
