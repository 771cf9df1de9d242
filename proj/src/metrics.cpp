//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rxnseq/parallel.hpp"
#include "rxnseq/schema.hpp"

namespace rxnseq::metrics {

std::string_view to_string(MatchMode mode) {
  return mode == MatchMode::Hard ? "hard" : "soft";
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  if (sum <= 0) return 0;
  return 2 * precision * recall / sum;
}

double iou(const BBox& a, const BBox& b) {
  if (a.degenerate() || b.degenerate()) {
    throw std::invalid_argument("iou: degenerate box");
  }
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0 || iy <= 0) return 0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

namespace {

// IoU that treats degenerate boxes as unmatchable instead of erroring, so
// evaluation stays total on un-postprocessed predictions.
double iou_or_zero(const BBox& a, const BBox& b) {
  if (a.degenerate() || b.degenerate()) return 0;
  return iou(a, b);
}

bool clears(double value, double threshold, bool inclusive) {
  return inclusive ? value >= threshold : value > threshold;
}

// True iff every entity in `from` has a threshold-clearing IoU partner of
// any index in `to`.
bool covered(std::span<const ParsedEntity> from, std::span<const ParsedEntity> to,
             const MatchConfig& config) {
  for (const auto& f : from) {
    double best = 0;
    for (const auto& t : to) best = std::max(best, iou_or_zero(f.bbox, t.bbox));
    if (!clears(best, config.iou_threshold, config.inclusive_threshold)) return false;
  }
  return true;
}

std::vector<ParsedEntity> molecules_of(std::span<const ParsedEntity> entities) {
  std::vector<ParsedEntity> out;
  for (const auto& e : entities) {
    if (e.etype == EntityType::Mol) out.push_back(e);
  }
  return out;
}

void finalize(ScoreSummary& s) {
  s.precision = s.total_predictions > 0
                    ? static_cast<double>(s.matched_predictions) / s.total_predictions
                    : 0;
  s.recall = s.total_ground_truth > 0
                 ? static_cast<double>(s.matched_ground_truth) / s.total_ground_truth
                 : 0;
  s.f1 = f1_score(s.precision, s.recall);
}

}  // namespace

std::vector<std::optional<std::size_t>> match_entities(
    std::span<const ParsedEntity> gt, std::span<const ParsedEntity> pred,
    double threshold, bool inclusive_threshold) {
  if (!(threshold > 0) || threshold > 1) {
    throw std::invalid_argument("match_entities: threshold must be in (0, 1]");
  }
  std::vector<std::optional<std::size_t>> out(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    double best = 0;
    std::optional<std::size_t> best_j;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double v = iou_or_zero(gt[i].bbox, pred[j].bbox);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j && clears(best, threshold, inclusive_threshold)) out[i] = best_j;
  }
  return out;
}

bool reaction_match(const ParsedReaction& gt, const ParsedReaction& pred,
                    MatchMode mode, const MatchConfig& config) {
  if (mode == MatchMode::Hard) {
    return covered(gt.reactants, pred.reactants, config) &&
           covered(pred.reactants, gt.reactants, config) &&
           covered(gt.conditions, pred.conditions, config) &&
           covered(pred.conditions, gt.conditions, config) &&
           covered(gt.products, pred.products, config) &&
           covered(pred.products, gt.products, config);
  }

  // Soft: molecules only; reactants and conditions pool into one input side.
  std::vector<ParsedEntity> gt_input = molecules_of(gt.reactants);
  for (const auto& e : molecules_of(gt.conditions)) gt_input.push_back(e);
  std::vector<ParsedEntity> pred_input = molecules_of(pred.reactants);
  for (const auto& e : molecules_of(pred.conditions)) pred_input.push_back(e);
  const std::vector<ParsedEntity> gt_products = molecules_of(gt.products);
  const std::vector<ParsedEntity> pred_products = molecules_of(pred.products);

  return covered(gt_input, pred_input, config) &&
         covered(pred_input, gt_input, config) &&
         covered(gt_products, pred_products, config) &&
         covered(pred_products, gt_products, config);
}

MetricsReport evaluate(const Dataset& gt,
                       const std::map<std::string, ReactionStructure>& pred,
                       MatchMode mode, const MatchConfig& config,
                       bool with_per_diagram) {
  for (const auto& [image_id, structure] : pred) {
    if (!gt.find_record(image_id)) {
      throw Error("evaluate: prediction for unknown image_id \"" + image_id + "\"");
    }
  }

  static const ReactionStructure kEmpty;
  struct DiagramCounts {
    ScoreSummary counts;
    Style style = Style::SingleLine;
    std::string image_id;
  };
  std::vector<DiagramCounts> per_diagram(gt.records.size());

  parallel_for(gt.records.size(), [&](std::size_t i) {
    const DiagramRecord& record = gt.records[i];
    const auto it = pred.find(record.image_id);
    const ReactionStructure& predicted = it != pred.end() ? it->second : kEmpty;
    const ReactionStructure truth = to_structure(record);

    DiagramCounts& slot = per_diagram[i];
    slot.style = record.style;
    slot.image_id = record.image_id;
    slot.counts.total_ground_truth = static_cast<long>(truth.reactions.size());
    slot.counts.total_predictions = static_cast<long>(predicted.reactions.size());

    for (const auto& p : predicted.reactions) {
      const bool matched = std::any_of(
          truth.reactions.begin(), truth.reactions.end(),
          [&](const ParsedReaction& g) { return reaction_match(g, p, mode, config); });
      if (matched) ++slot.counts.matched_predictions;
    }
    for (const auto& g : truth.reactions) {
      const bool matched = std::any_of(
          predicted.reactions.begin(), predicted.reactions.end(),
          [&](const ParsedReaction& p) { return reaction_match(g, p, mode, config); });
      if (matched) ++slot.counts.matched_ground_truth;
    }
    finalize(slot.counts);
  });

  MetricsReport report;
  report.mode = mode;
  for (Style s : kAllStyles) report.per_style[s];  // all four rows, even if empty
  if (with_per_diagram) report.per_diagram.emplace();

  for (const auto& slot : per_diagram) {
    auto add = [&](ScoreSummary& into) {
      into.matched_predictions += slot.counts.matched_predictions;
      into.total_predictions += slot.counts.total_predictions;
      into.matched_ground_truth += slot.counts.matched_ground_truth;
      into.total_ground_truth += slot.counts.total_ground_truth;
    };
    add(report.overall);
    add(report.per_style[slot.style]);
    if (report.per_diagram) {
      report.per_diagram->emplace_back(slot.image_id, slot.counts);
    }
  }
  finalize(report.overall);
  for (auto& [style, summary] : report.per_style) finalize(summary);
  return report;
}

namespace {

void append_summary(std::ostringstream& out, const std::string& prefix,
                    const ScoreSummary& s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", s.precision);
  out << prefix << "precision: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", s.recall);
  out << prefix << "recall: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", s.f1);
  out << prefix << "f1: " << buf << "\n";
  out << prefix << "matched_predictions: " << s.matched_predictions << "\n";
  out << prefix << "total_predictions: " << s.total_predictions << "\n";
  out << prefix << "matched_ground_truth: " << s.matched_ground_truth << "\n";
  out << prefix << "total_ground_truth: " << s.total_ground_truth << "\n";
}

nlohmann::ordered_json summary_json(const ScoreSummary& s) {
  return {{"precision", s.precision},
          {"recall", s.recall},
          {"f1", s.f1},
          {"matched_predictions", s.matched_predictions},
          {"total_predictions", s.total_predictions},
          {"matched_ground_truth", s.matched_ground_truth},
          {"total_ground_truth", s.total_ground_truth}};
}

}  // namespace

std::string to_text(const MetricsReport& report, bool by_style) {
  std::ostringstream out;
  out << "mode: " << to_string(report.mode) << "\n";
  append_summary(out, "", report.overall);
  if (by_style) {
    for (const auto& [style, summary] : report.per_style) {
      append_summary(out, std::string(to_string(style)) + ".", summary);
    }
  }
  return out.str();
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["mode"] = to_string(report.mode);
  doc["overall"] = summary_json(report.overall);
  nlohmann::ordered_json styles;
  for (const auto& [style, summary] : report.per_style) {
    styles[std::string(to_string(style))] = summary_json(summary);
  }
  doc["per_style"] = styles;
  if (report.per_diagram) {
    nlohmann::ordered_json diagrams = nlohmann::ordered_json::array();
    for (const auto& [image_id, summary] : *report.per_diagram) {
      nlohmann::ordered_json entry = summary_json(summary);
      entry["image_id"] = image_id;
      diagrams.push_back(std::move(entry));
    }
    doc["per_diagram"] = diagrams;
  }
  return doc.dump(2);
}

}  // namespace rxnseq::metrics
