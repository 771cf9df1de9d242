//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include "rxnseq/errors.hpp"
#include "rxnseq/parallel.hpp"
#include "rxnseq/rng.hpp"

namespace rxnseq::dataset_io {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  if (s[i] == '0' && s.size() > i + 1) return false;  // no leading zeros
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

std::string id_to_string(const ordered_json& v, const char* what) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_string()) return v.get<std::string>();
  throw ParseError(std::string(what) + ": id must be an integer or string");
}

double number_at(const ordered_json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return v.get<double>();
}

const ordered_json& field(const ordered_json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(what) + ": missing key \"" + key + "\"");
  }
  return *it;
}

const ordered_json& array_field(const ordered_json& obj, const char* key,
                                const char* what) {
  const auto& v = field(obj, key, what);
  if (!v.is_array()) {
    throw ParseError(std::string(what) + ": \"" + key + "\" must be an array");
  }
  return v;
}

BBox bbox_from_json(const ordered_json& v, const char* what) {
  if (!v.is_array() || v.size() != 4) {
    throw ParseError(std::string(what) + ": bbox must be an array of 4 numbers");
  }
  return BBox{number_at(v[0], what), number_at(v[1], what), number_at(v[2], what),
              number_at(v[3], what)};
}

DiagramRecord record_from_json(const ordered_json& img) {
  if (!img.is_object()) throw ParseError("image entry: expected an object");
  DiagramRecord record;
  record.image_id = id_to_string(field(img, "id", "image"), "image");
  record.file_name = field(img, "file_name", "image").get<std::string>();
  record.width = static_cast<int>(number_at(field(img, "width", "image"), "image width"));
  record.height =
      static_cast<int>(number_at(field(img, "height", "image"), "image height"));

  const auto style_text = field(img, "style", "image").get<std::string>();
  const auto style = style_from_string(style_text);
  if (!style) {
    throw ParseError("image " + record.image_id + ": unknown style \"" + style_text +
                     "\"");
  }
  record.style = *style;

  for (const auto& e : array_field(img, "entities", "image")) {
    Entity entity;
    entity.id = field(e, "id", "entity").get<int>();
    entity.bbox = bbox_from_json(field(e, "bbox", "entity"), "entity bbox");
    const auto cat = field(e, "category", "entity").get<std::string>();
    const auto etype = entity_type_from_string(cat);
    if (!etype) {
      throw ParseError("image " + record.image_id + ": unknown category \"" + cat +
                       "\"");
    }
    entity.etype = *etype;
    record.entities.push_back(entity);
  }
  for (const auto& r : array_field(img, "reactions", "image")) {
    Reaction reaction;
    for (const auto& id : array_field(r, "reactants", "reaction"))
      reaction.reactants.push_back(id.get<int>());
    for (const auto& id : array_field(r, "conditions", "reaction"))
      reaction.conditions.push_back(id.get<int>());
    for (const auto& id : array_field(r, "products", "reaction"))
      reaction.products.push_back(id.get<int>());
    record.reactions.push_back(reaction);
  }
  return record;
}

ordered_json record_to_json(const DiagramRecord& record) {
  ordered_json img;
  if (is_integer_literal(record.image_id)) {
    img["id"] = std::stoll(record.image_id);
  } else {
    img["id"] = record.image_id;
  }
  img["file_name"] = record.file_name;
  img["width"] = record.width;
  img["height"] = record.height;
  img["style"] = std::string(to_string(record.style));
  auto& entities = img["entities"] = ordered_json::array();
  for (const auto& e : record.entities) {
    ordered_json entity;
    entity["id"] = e.id;
    entity["bbox"] = {e.bbox.x1, e.bbox.y1, e.bbox.x2, e.bbox.y2};
    entity["category"] = std::string(to_string(e.etype));
    entities.push_back(std::move(entity));
  }
  auto& reactions = img["reactions"] = ordered_json::array();
  for (const auto& r : record.reactions) {
    ordered_json reaction;
    reaction["reactants"] = r.reactants;
    reaction["conditions"] = r.conditions;
    reaction["products"] = r.products;
    reactions.push_back(std::move(reaction));
  }
  return img;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + ": " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buf.str();
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    throw ParseError("dataset: expected an object with an \"images\" array");
  }
  Dataset dataset;
  for (const auto& img : doc["images"]) {
    dataset.records.push_back(record_from_json(img));
  }
  const auto violations = validate_dataset(dataset);
  if (!violations.empty()) {
    throw ValidationError("dataset", violations);
  }
  return dataset;
}

std::string serialize_dataset(const Dataset& dataset) {
  ordered_json doc;
  auto& images = doc["images"] = ordered_json::array();
  for (const auto& record : dataset.records) {
    images.push_back(record_to_json(record));
  }
  return doc.dump(2) + "\n";
}

Dataset load(const std::string& path) {
  try {
    return parse_dataset(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.violations());
  }
}

void save(const Dataset& dataset, const std::string& path) {
  write_file_atomic(path, serialize_dataset(dataset));
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + ": " + std::strerror(errno));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const std::string reason = std::strerror(errno);
    std::remove(tmp.c_str());
    throw IoError("cannot rename " + tmp + " to " + path + ": " + reason);
  }
}

DatasetStats stats(const Dataset& dataset) {
  // Parallel map to per-record counts, then an order-independent fold.
  struct Partial {
    std::size_t style = 0;
    long entities = 0;
    long reactions = 0;
  };
  std::vector<Partial> partials(dataset.records.size());
  parallel_for(dataset.records.size(), [&](std::size_t i) {
    const auto& record = dataset.records[i];
    partials[i] = Partial{static_cast<std::size_t>(record.style),
                          static_cast<long>(record.entities.size()),
                          static_cast<long>(record.reactions.size())};
  });

  DatasetStats s;
  for (const auto& p : partials) {
    s.per_style[p.style].diagrams += 1;
    s.per_style[p.style].entities += p.entities;
    s.per_style[p.style].reactions += p.reactions;
    s.reactions_histogram[static_cast<int>(p.reactions)] += 1;
  }
  for (const auto& row : s.per_style) {
    s.overall.diagrams += row.diagrams;
    s.overall.entities += row.entities;
    s.overall.reactions += row.reactions;
  }
  auto finish = [](StyleStats& row) {
    if (row.diagrams > 0) {
      const double avg = static_cast<double>(row.reactions) / static_cast<double>(row.diagrams);
      row.avg_reactions = std::round(avg * 10.0) / 10.0;
    }
  };
  for (auto& row : s.per_style) finish(row);
  finish(s.overall);
  return s;
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %10s %10s %10s %6s\n", "style", "diagrams",
                "entities", "reactions", "avg");
  out << line;
  auto row = [&](std::string_view name, const StyleStats& st) {
    std::snprintf(line, sizeof(line), "%-14s %10ld %10ld %10ld %6.1f\n",
                  std::string(name).c_str(), st.diagrams, st.entities, st.reactions,
                  st.avg_reactions);
    out << line;
  };
  for (std::size_t i = 0; i < s.per_style.size(); ++i) {
    row(to_string(kAllStyles[i]), s.per_style[i]);
  }
  row("overall", s.overall);
  out << "\nreactions per diagram\n";
  for (const auto& [count, diagrams] : s.reactions_histogram) {
    std::snprintf(line, sizeof(line), "%4d: %ld\n", count, diagrams);
    out << line;
  }
  return out.str();
}

FoldAssignment split_folds(const Dataset& dataset, int k, std::uint64_t seed,
                           bool stratify_by_style) {
  const auto n = dataset.records.size();
  if (k < 2) throw std::invalid_argument("split_folds: k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("split_folds: k exceeds the record count");
  }

  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  Rng rng(seed);

  // fold_of[i] is the fold of dataset.records[i].
  std::vector<int> fold_of(n, 0);
  int counter = 0;
  auto assign_group = [&](std::vector<std::size_t>& indices) {
    rng.shuffle(indices);
    for (const auto idx : indices) {
      fold_of[idx] = counter % k;
      ++counter;
    }
  };

  if (stratify_by_style) {
    for (const Style style : kAllStyles) {
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < n; ++i) {
        if (dataset.records[i].style == style) group.push_back(i);
      }
      assign_group(group);
    }
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    assign_group(all);
  }

  for (std::size_t i = 0; i < n; ++i) {
    folds.assignment.emplace_back(dataset.records[i].image_id, fold_of[i]);
  }
  return folds;
}

std::string serialize_folds(const FoldAssignment& folds) {
  ordered_json doc;
  doc["folds"] = folds.k;
  doc["seed"] = folds.seed;
  auto& assignment = doc["assignment"] = ordered_json::object();
  for (const auto& [image_id, fold] : folds.assignment) {
    assignment[image_id] = fold;
  }
  return doc.dump(2) + "\n";
}

void save_folds(const FoldAssignment& folds, const std::string& path) {
  write_file_atomic(path, serialize_folds(folds));
}

namespace {

// Tolerant readers for externally published annotation files.

std::optional<EntityType> external_category(const ordered_json& e) {
  if (auto it = e.find("category"); it != e.end() && it->is_string()) {
    std::string c = it->get<std::string>();
    std::transform(c.begin(), c.end(), c.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (c.rfind("mol", 0) == 0) return EntityType::Mol;
    if (c.rfind("txt", 0) == 0 || c.rfind("text", 0) == 0) return EntityType::Txt;
    if (c.rfind("idt", 0) == 0 || c.rfind("ident", 0) == 0 || c.rfind("label", 0) == 0) {
      return EntityType::Idt;
    }
    return std::nullopt;
  }
  if (auto it = e.find("category_id"); it != e.end() && it->is_number_integer()) {
    switch (it->get<int>()) {
      case 1: return EntityType::Mol;
      case 2: return EntityType::Txt;
      case 3: return EntityType::Idt;
      default: return std::nullopt;
    }
  }
  return std::nullopt;
}

const ordered_json* find_any(const ordered_json& obj,
                             std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (auto it = obj.find(key); it != obj.end()) return &*it;
  }
  return nullptr;
}

}  // namespace

Dataset convert_external(const std::string& text, BBoxFormat format) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  const ordered_json* images = nullptr;
  if (doc.is_array()) {
    images = &doc;
  } else if (doc.is_object()) {
    images = find_any(doc, {"images", "data"});
  }
  if (images == nullptr || !images->is_array()) {
    throw ParseError("external dataset: expected an array of images or an object "
                     "with an \"images\" array");
  }

  Dataset dataset;
  for (const auto& img : *images) {
    DiagramRecord record;
    if (const auto* id = find_any(img, {"id", "image_id"})) {
      record.image_id = id_to_string(*id, "external image");
    } else {
      record.image_id = std::to_string(dataset.records.size());
    }
    if (const auto* name = find_any(img, {"file_name", "filename", "image"})) {
      if (name->is_string()) record.file_name = name->get<std::string>();
    }
    record.width =
        static_cast<int>(number_at(field(img, "width", "external image"), "width"));
    record.height =
        static_cast<int>(number_at(field(img, "height", "external image"), "height"));
    record.style = Style::SingleLine;
    if (const auto* style = find_any(img, {"style", "diagram_type", "type"})) {
      if (style->is_string()) {
        if (auto parsed = style_from_string(style->get<std::string>())) {
          record.style = *parsed;
        }
      }
    }

    const auto* entities = find_any(img, {"entities", "bboxes", "annotations"});
    if (entities != nullptr && entities->is_array()) {
      for (const auto& e : *entities) {
        Entity entity;
        if (const auto* id = find_any(e, {"id", "entity_id"})) {
          entity.id = id->get<int>();
        } else {
          entity.id = static_cast<int>(record.entities.size());
        }
        BBox raw = bbox_from_json(field(e, "bbox", "external entity"), "entity bbox");
        if (format == BBoxFormat::XYWH) {
          raw = BBox{raw.x1, raw.y1, raw.x1 + raw.x2, raw.y1 + raw.y2};
        }
        entity.bbox = clip_bbox(raw, record.width, record.height);
        const auto etype = external_category(e);
        if (!etype) {
          throw ParseError("external image " + record.image_id +
                           ": entity with unrecognized category");
        }
        entity.etype = *etype;
        record.entities.push_back(entity);
      }
    }

    const auto* reactions = find_any(img, {"reactions"});
    if (reactions != nullptr && reactions->is_array()) {
      for (const auto& r : *reactions) {
        Reaction reaction;
        for (const auto& id : array_field(r, "reactants", "external reaction"))
          reaction.reactants.push_back(id.get<int>());
        for (const auto& id : array_field(r, "conditions", "external reaction"))
          reaction.conditions.push_back(id.get<int>());
        for (const auto& id : array_field(r, "products", "external reaction"))
          reaction.products.push_back(id.get<int>());
        record.reactions.push_back(reaction);
      }
    }
    dataset.records.push_back(std::move(record));
  }

  const auto violations = validate_dataset(dataset);
  if (!violations.empty()) {
    throw ValidationError("converted dataset", violations);
  }
  return dataset;
}

}  // namespace rxnseq::dataset_io
