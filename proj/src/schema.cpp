//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/schema.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace rxnseq {

BBox clip_bbox(const BBox& b, double width, double height) {
  auto clamp = [](double v, double hi) { return std::min(std::max(v, 0.0), hi); };
  return BBox{clamp(b.x1, width), clamp(b.y1, height), clamp(b.x2, width),
              clamp(b.y2, height)};
}

std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::Mol: return "mol";
    case EntityType::Txt: return "txt";
    case EntityType::Idt: return "idt";
  }
  return "?";
}

std::optional<EntityType> entity_type_from_string(std::string_view s) {
  if (s == "mol") return EntityType::Mol;
  if (s == "txt") return EntityType::Txt;
  if (s == "idt") return EntityType::Idt;
  return std::nullopt;
}

std::string_view to_string(Style s) {
  switch (s) {
    case Style::SingleLine: return "single-line";
    case Style::MultipleLine: return "multiple-line";
    case Style::Tree: return "tree";
    case Style::Graph: return "graph";
  }
  return "?";
}

std::optional<Style> style_from_string(std::string_view s) {
  if (s == "single-line") return Style::SingleLine;
  if (s == "multiple-line") return Style::MultipleLine;
  if (s == "tree") return Style::Tree;
  if (s == "graph") return Style::Graph;
  return std::nullopt;
}

const Entity* DiagramRecord::find_entity(int id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const DiagramRecord* Dataset::find_record(const std::string& image_id) const {
  for (const auto& r : records) {
    if (r.image_id == image_id) return &r;
  }
  return nullptr;
}

namespace {

void check_role(const DiagramRecord& record, std::size_t reaction_index,
                const std::vector<int>& ids, const char* role,
                std::vector<Violation>& out) {
  std::set<int> seen;
  for (int id : ids) {
    if (!record.find_entity(id)) {
      std::ostringstream msg;
      msg << "reaction " << reaction_index << " " << role << " references entity id "
          << id << " which does not exist";
      out.push_back({"unresolved entity id", msg.str()});
    }
    if (!seen.insert(id).second) {
      std::ostringstream msg;
      msg << "reaction " << reaction_index << " repeats entity id " << id << " in "
          << role;
      out.push_back({"duplicate id in role", msg.str()});
    }
  }
}

}  // namespace

std::vector<Violation> validate_record(const DiagramRecord& record) {
  std::vector<Violation> out;

  if (record.width <= 0 || record.height <= 0) {
    std::ostringstream msg;
    msg << "image dimensions " << record.width << "x" << record.height
        << " must be positive";
    out.push_back({"non-positive dimensions", msg.str()});
  }

  std::unordered_set<int> ids;
  for (const auto& e : record.entities) {
    if (!ids.insert(e.id).second) {
      std::ostringstream msg;
      msg << "entity id " << e.id << " occurs more than once";
      out.push_back({"duplicate entity id", msg.str()});
    }
    if (e.bbox.x2 < e.bbox.x1 || e.bbox.y2 < e.bbox.y1) {
      std::ostringstream msg;
      msg << "entity " << e.id << " bbox (" << e.bbox.x1 << "," << e.bbox.y1 << ","
          << e.bbox.x2 << "," << e.bbox.y2 << ") has inverted corners";
      out.push_back({"degenerate bbox", msg.str()});
    }
    if (e.bbox.x1 < 0 || e.bbox.y1 < 0 || e.bbox.x2 > record.width ||
        e.bbox.y2 > record.height) {
      std::ostringstream msg;
      msg << "entity " << e.id << " bbox (" << e.bbox.x1 << "," << e.bbox.y1 << ","
          << e.bbox.x2 << "," << e.bbox.y2 << ") exceeds image bounds "
          << record.width << "x" << record.height;
      out.push_back({"bbox out of bounds", msg.str()});
    }
  }

  for (std::size_t i = 0; i < record.reactions.size(); ++i) {
    const auto& rxn = record.reactions[i];
    if (rxn.reactants.empty()) {
      std::ostringstream msg;
      msg << "reaction " << i << " has no reactants";
      out.push_back({"reactants empty", msg.str()});
    }
    if (rxn.products.empty()) {
      std::ostringstream msg;
      msg << "reaction " << i << " has no products";
      out.push_back({"products empty", msg.str()});
    }
    check_role(record, i, rxn.reactants, "reactants", out);
    check_role(record, i, rxn.conditions, "conditions", out);
    check_role(record, i, rxn.products, "products", out);
  }

  return out;
}

std::vector<Violation> validate_dataset(const Dataset& dataset) {
  std::vector<Violation> out;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& record = dataset.records[i];
    auto [it, inserted] = seen.emplace(record.image_id, i);
    if (!inserted) {
      std::ostringstream msg;
      msg << "image_id \"" << record.image_id << "\" occurs at records " << it->second
          << " and " << i;
      out.push_back({"duplicate image_id", msg.str()});
    }
    for (auto& v : validate_record(record)) {
      v.message = record.image_id + ": " + v.message;
      out.push_back(std::move(v));
    }
  }
  return out;
}

namespace {

std::string violation_summary(const std::string& context,
                              const std::vector<Violation>& violations) {
  std::ostringstream msg;
  msg << context << ": " << violations.size() << " violation"
      << (violations.size() == 1 ? "" : "s");
  for (const auto& v : violations) {
    msg << "\n  [" << v.rule << "] " << v.message;
  }
  return msg.str();
}

}  // namespace

ValidationError::ValidationError(const std::string& context,
                                 std::vector<Violation> violations)
    : Error(violation_summary(context, violations)),
      violations_(std::move(violations)) {}

ReactionStructure to_structure(const DiagramRecord& record) {
  auto resolve = [&](const std::vector<int>& ids) {
    std::vector<ParsedEntity> out;
    out.reserve(ids.size());
    for (int id : ids) {
      const Entity* e = record.find_entity(id);
      if (!e) {
        throw ValidationError(
            "to_structure(" + record.image_id + ")",
            {{"unresolved entity id",
              "entity id " + std::to_string(id) + " does not exist"}});
      }
      out.push_back({e->bbox, e->etype});
    }
    return out;
  };

  ReactionStructure structure;
  structure.reactions.reserve(record.reactions.size());
  for (const auto& rxn : record.reactions) {
    structure.reactions.push_back({resolve(rxn.reactants), resolve(rxn.conditions),
                                   resolve(rxn.products)});
  }
  return structure;
}

DiagramRecord to_record(const ReactionStructure& structure,
                        const std::string& image_id, const std::string& file_name,
                        int width, int height, Style style) {
  DiagramRecord record;
  record.image_id = image_id;
  record.file_name = file_name;
  record.width = width;
  record.height = height;
  record.style = style;

  using Key = std::tuple<double, double, double, double, int>;
  std::map<Key, int> id_of;

  auto intern = [&](const ParsedEntity& e) {
    const Key key{e.bbox.x1, e.bbox.y1, e.bbox.x2, e.bbox.y2,
                  static_cast<int>(e.etype)};
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    const int id = static_cast<int>(record.entities.size());
    id_of.emplace(key, id);
    record.entities.push_back({id, e.bbox, e.etype});
    return id;
  };

  // A decoded role list can repeat one box; a second occurrence adds nothing
  // and would break the no-repeat-per-role invariant, so collapse it.
  auto fill_role = [&](const std::vector<ParsedEntity>& entities,
                       std::vector<int>& role) {
    for (const auto& e : entities) {
      const int id = intern(e);
      if (std::find(role.begin(), role.end(), id) == role.end()) role.push_back(id);
    }
  };

  for (const auto& parsed : structure.reactions) {
    Reaction rxn;
    fill_role(parsed.reactants, rxn.reactants);
    fill_role(parsed.conditions, rxn.conditions);
    fill_role(parsed.products, rxn.products);
    record.reactions.push_back(std::move(rxn));
  }
  return record;
}

}  // namespace rxnseq
