//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line surface for the reaction-diagram sequence toolkit.
//
// Exit codes: 0 success, 1 validation or parse failure, 2 usage error,
// 3 external model process failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rxnseq/augment.hpp"
#include "rxnseq/codec.hpp"
#include "rxnseq/dataset_io.hpp"
#include "rxnseq/decoder.hpp"
#include "rxnseq/errors.hpp"
#include "rxnseq/metrics.hpp"
#include "rxnseq/model_bridge.hpp"
#include "rxnseq/parallel.hpp"
#include "rxnseq/raster.hpp"
#include "rxnseq/rng.hpp"
#include "rxnseq/schema.hpp"

namespace {

using namespace rxnseq;

codec::OrderingPolicy policy_from_name(const std::string& name, std::uint64_t seed) {
  if (name == "annotated") return codec::OrderingPolicy::annotated();
  if (name == "reading") return codec::OrderingPolicy::reading();
  return codec::OrderingPolicy::random(seed);
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

void write_png_atomic(const RasterImage& image, const std::string& path) {
  const std::string tmp = path + ".tmp";
  write_png(image, tmp);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

struct EncodeArgs {
  std::string dataset, out, order = "reading";
  std::uint64_t seed = 0;
  int n_bins = 2000;
};

int run_encode(const EncodeArgs& args) {
  const Dataset dataset = dataset_io::load(args.dataset);
  const codec::Vocabulary vocab{args.n_bins};
  const auto policy = policy_from_name(args.order, args.seed);

  std::vector<codec::TokenFileEntry> entries(dataset.records.size());
  parallel_for(dataset.records.size(), [&](std::size_t i) {
    const auto& record = dataset.records[i];
    entries[i] = {record.image_id, codec::encode(record, vocab, policy)};
  });

  std::ostringstream buf;
  codec::write_token_file(buf, entries);
  dataset_io::write_file_atomic(args.out, buf.str());
  std::cout << entries.size() << " sequences written to " << args.out << "\n";
  return 0;
}

struct DecodeArgs {
  std::string dataset, out, model_cmd, replay, images;
  int n_bins = 2000;
  int max_length = 500;
  double handshake_timeout = 30.0;
  double step_timeout = 10.0;
};

int run_decode(const DecodeArgs& args) {
  const Dataset dataset = dataset_io::load(args.dataset);
  const codec::Vocabulary vocab{args.n_bins};

  std::map<std::string, const codec::TokenSequence*> replay_map;
  std::vector<codec::TokenFileEntry> entries;
  if (!args.replay.empty()) {
    entries = codec::read_token_file(args.replay);
    for (const auto& entry : entries) replay_map[entry.image_id] = &entry.seq;
  }

  Dataset predictions;
  predictions.records.resize(dataset.records.size());
  parallel_for(dataset.records.size(), [&](std::size_t i) {
    const auto& record = dataset.records[i];
    decode::DecodeConfig config;
    config.vocab = vocab;
    config.max_length = args.max_length;
    config.image_width = record.width;
    config.image_height = record.height;

    decode::DecodeOutcome outcome;
    if (!args.replay.empty()) {
      const auto it = replay_map.find(record.image_id);
      if (it == replay_map.end()) {
        throw Error("decode: no replay sequence for image " + record.image_id);
      }
      try {
        decode::ReplayOracle oracle(*it->second, vocab);
        outcome = decode::greedy_decode(oracle, config);
      } catch (const std::invalid_argument& e) {
        throw Error("decode: replay target for image " + record.image_id + ": " +
                    e.what());
      }
    } else {
      bridge::BridgeConfig bridge_config;
      bridge_config.command = args.model_cmd;
      bridge_config.handshake_timeout_s = args.handshake_timeout;
      bridge_config.step_timeout_s = args.step_timeout;
      bridge::ModelBridge source(bridge_config, vocab,
                                 join_path(args.images, record.file_name));
      outcome = decode::greedy_decode(source, config);
    }
    predictions.records[i] =
        to_record(outcome.structure, record.image_id, record.file_name, record.width,
                  record.height, record.style);
  });

  dataset_io::save(predictions, args.out);
  std::cout << predictions.records.size() << " predictions written to " << args.out
            << "\n";
  return 0;
}

struct EvalArgs {
  std::string gt, pred, mode = "hard";
  bool by_style = false;
  bool as_json = false;
  bool inclusive_iou = false;
};

int run_eval(const EvalArgs& args) {
  const Dataset gt = dataset_io::load(args.gt);
  const Dataset pred_dataset = dataset_io::load(args.pred);

  std::map<std::string, ReactionStructure> predictions;
  for (const auto& record : pred_dataset.records) {
    predictions[record.image_id] = to_structure(record);
  }

  const auto mode =
      args.mode == "soft" ? metrics::MatchMode::Soft : metrics::MatchMode::Hard;
  metrics::MatchConfig config;
  config.inclusive_threshold = args.inclusive_iou;

  const auto report = metrics::evaluate(gt, predictions, mode, config);
  if (args.as_json) {
    std::cout << metrics::to_json(report);
  } else {
    std::cout << metrics::to_text(report, args.by_style);
  }
  return 0;
}

struct AugmentArgs {
  std::string dataset, images, out;
  int num = 1;
  augment::AugmentConfig config;
};

int run_augment(const AugmentArgs& args) {
  const Dataset dataset = dataset_io::load(args.dataset);
  args.config.validate();
  std::filesystem::create_directories(args.out);
  augment::DirectoryImageStore store(args.images);

  Dataset augmented;
  augmented.records.resize(static_cast<std::size_t>(args.num));
  parallel_for(static_cast<std::size_t>(args.num), [&](std::size_t i) {
    // Every sample derives its own stream, so outputs do not depend on how
    // samples are distributed over workers.
    Rng rng(mix_seed(args.config.seed, static_cast<std::uint64_t>(i)));
    auto sample = augment::augment_sample(dataset, store, args.config, rng);

    char stem[32];
    std::snprintf(stem, sizeof(stem), "aug_%05zu", i);
    sample.record.image_id = stem;
    sample.record.file_name = std::string(stem) + ".png";
    write_png_atomic(sample.image, join_path(args.out, sample.record.file_name));
    augmented.records[i] = std::move(sample.record);
  });

  dataset_io::save(augmented, join_path(args.out, "augmented.json"));
  std::cout << args.num << " samples written to " << args.out << "\n";
  return 0;
}

struct StatsArgs {
  std::string dataset;
};

int run_stats(const StatsArgs& args) {
  const Dataset dataset = dataset_io::load(args.dataset);
  std::cout << dataset_io::format_stats(dataset_io::stats(dataset));
  return 0;
}

struct SplitArgs {
  std::string dataset, out;
  int folds = 5;
  std::uint64_t seed = 0;
  bool stratify = false;
};

int run_split(const SplitArgs& args) {
  const Dataset dataset = dataset_io::load(args.dataset);
  const auto assignment =
      dataset_io::split_folds(dataset, args.folds, args.seed, args.stratify);
  dataset_io::save_folds(assignment, args.out);

  std::vector<long> sizes(static_cast<std::size_t>(args.folds), 0);
  for (const auto& [id, fold] : assignment.assignment) {
    sizes[static_cast<std::size_t>(fold)] += 1;
  }
  std::cout << "fold sizes:";
  for (long s : sizes) std::cout << " " << s;
  std::cout << "\n";
  return 0;
}

struct RenderArgs {
  std::string dataset, images, out, pred;
};

// Role colors for overlays; identifier and text boxes get a thinner border
// than molecules so the entity type stays readable.
int run_render(const RenderArgs& args) {
  const Dataset gt = dataset_io::load(args.dataset);
  const Dataset source = args.pred.empty() ? gt : dataset_io::load(args.pred);
  std::filesystem::create_directories(args.out);

  const Rgb reactant_color{204, 32, 57};
  const Rgb condition_color{32, 96, 204};
  const Rgb product_color{24, 150, 72};

  long count = 0;
  for (const auto& record : source.records) {
    const RasterImage base = read_png(join_path(args.images, record.file_name));
    for (std::size_t k = 0; k < record.reactions.size(); ++k) {
      const auto& reaction = record.reactions[k];
      RasterImage canvas = base;
      auto draw_role = [&](const std::vector<int>& ids, Rgb color) {
        for (int id : ids) {
          const Entity* entity = record.find_entity(id);
          if (entity == nullptr) {
            throw Error("render: image " + record.image_id + " references entity " +
                        std::to_string(id) + " that does not exist");
          }
          const int thickness = entity->etype == EntityType::Mol ? 3 : 2;
          draw_rect(canvas, entity->bbox, color, thickness);
        }
      };
      draw_role(reaction.reactants, reactant_color);
      draw_role(reaction.conditions, condition_color);
      draw_role(reaction.products, product_color);

      const std::string name =
          record.image_id + "_rxn" + std::to_string(k) + ".png";
      write_png_atomic(canvas, join_path(args.out, name));
      ++count;
    }
  }
  std::cout << count << " overlays written to " << args.out << "\n";
  return 0;
}

struct ConvertArgs {
  std::string in, out, bbox_format = "xyxy";
};

int run_convert(const ConvertArgs& args) {
  std::ifstream file(args.in, std::ios::binary);
  if (!file) throw IoError("cannot open " + args.in);
  std::ostringstream buf;
  buf << file.rdbuf();

  const auto format = args.bbox_format == "xywh" ? dataset_io::BBoxFormat::XYWH
                                                 : dataset_io::BBoxFormat::XYXY;
  const Dataset dataset = dataset_io::convert_external(buf.str(), format);
  dataset_io::save(dataset, args.out);
  std::cout << dataset.records.size() << " records written to " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rxnseq: reaction diagram parsing toolkit"};
  app.require_subcommand(1);

  EncodeArgs encode_args;
  auto* cmd_encode = app.add_subcommand("encode", "serialize a dataset to token sequences");
  cmd_encode->add_option("--dataset", encode_args.dataset, "dataset JSON")->required();
  cmd_encode->add_option("--order", encode_args.order, "reaction ordering")
      ->check(CLI::IsMember({"annotated", "reading", "random"}));
  cmd_encode->add_option("--seed", encode_args.seed, "seed for --order random");
  cmd_encode->add_option("--n-bins", encode_args.n_bins, "coordinate bins")
      ->check(CLI::PositiveNumber);
  cmd_encode->add_option("--out", encode_args.out, "output token file")->required();

  DecodeArgs decode_args;
  auto* cmd_decode = app.add_subcommand("decode", "constrained greedy decoding");
  cmd_decode->add_option("--dataset", decode_args.dataset,
                         "dataset JSON naming the images to decode")
      ->required();
  cmd_decode->add_option("--model-cmd", decode_args.model_cmd,
                         "model server command (JSON-lines protocol)");
  cmd_decode->add_option("--replay", decode_args.replay, "token file to replay");
  cmd_decode->add_option("--images", decode_args.images,
                         "image directory passed to the model server");
  cmd_decode->add_option("--n-bins", decode_args.n_bins, "coordinate bins")
      ->check(CLI::PositiveNumber);
  cmd_decode->add_option("--max-length", decode_args.max_length, "token budget")
      ->check(CLI::PositiveNumber);
  cmd_decode->add_option("--handshake-timeout", decode_args.handshake_timeout,
                         "seconds to wait for the model to become ready");
  cmd_decode->add_option("--step-timeout", decode_args.step_timeout,
                         "seconds to wait for each logits response");
  cmd_decode->add_option("--out", decode_args.out, "output predictions JSON")->required();

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "score predictions against ground truth");
  cmd_eval->add_option("--gt", eval_args.gt, "ground truth dataset JSON")->required();
  cmd_eval->add_option("--pred", eval_args.pred, "predictions dataset JSON")->required();
  cmd_eval->add_option("--mode", eval_args.mode, "matching mode")
      ->check(CLI::IsMember({"hard", "soft"}));
  cmd_eval->add_flag("--by-style", eval_args.by_style, "add per-style rows");
  cmd_eval->add_flag("--json", eval_args.as_json, "emit the report as JSON");
  cmd_eval->add_flag("--inclusive-iou", eval_args.inclusive_iou,
                     "match on IoU >= threshold instead of >");

  AugmentArgs augment_args;
  auto* cmd_augment = app.add_subcommand("augment", "write augmented training samples");
  cmd_augment->add_option("--dataset", augment_args.dataset, "dataset JSON")->required();
  cmd_augment->add_option("--images", augment_args.images, "source image directory")
      ->required();
  cmd_augment->add_option("--out", augment_args.out, "output directory")->required();
  cmd_augment->add_option("--num", augment_args.num, "number of samples")
      ->check(CLI::PositiveNumber);
  cmd_augment->add_option("--seed", augment_args.config.seed, "master seed");
  cmd_augment->add_option("--compose-probability", augment_args.config.compose_probability,
                          "chance of multi-diagram composition");
  cmd_augment->add_option("--max-compose", augment_args.config.max_compose,
                          "most diagrams per composition");
  cmd_augment->add_option("--decay-ratio", augment_args.config.decay_ratio,
                          "geometric decay of the compose count");
  cmd_augment->add_option("--rotation-degrees", augment_args.config.rotation_degrees,
                          "rotation range in degrees");
  cmd_augment->add_option("--hflip-probability", augment_args.config.hflip_probability,
                          "horizontal flip chance");
  cmd_augment->add_option("--vflip-probability", augment_args.config.vflip_probability,
                          "vertical flip chance");
  cmd_augment->add_option("--color-jitter", augment_args.config.color_jitter_amplitude,
                          "brightness/contrast/saturation amplitude");
  cmd_augment->add_option("--target-size", augment_args.config.target_size,
                          "output canvas side length")
      ->check(CLI::PositiveNumber);

  StatsArgs stats_args;
  auto* cmd_stats = app.add_subcommand("stats", "dataset statistics table");
  cmd_stats->add_option("--dataset", stats_args.dataset, "dataset JSON")->required();

  SplitArgs split_args;
  auto* cmd_split = app.add_subcommand("split", "k-fold cross validation assignment");
  cmd_split->add_option("--dataset", split_args.dataset, "dataset JSON")->required();
  cmd_split->add_option("--folds", split_args.folds, "fold count")
      ->check(CLI::Range(2, 1000000));
  cmd_split->add_option("--seed", split_args.seed, "shuffle seed");
  cmd_split->add_flag("--stratify-by-style", split_args.stratify,
                      "balance folds within each style");
  cmd_split->add_option("--out", split_args.out, "output assignment JSON")->required();

  RenderArgs render_args;
  auto* cmd_render = app.add_subcommand("render", "draw per-reaction box overlays");
  cmd_render->add_option("--dataset", render_args.dataset, "dataset JSON")->required();
  cmd_render->add_option("--images", render_args.images, "source image directory")
      ->required();
  cmd_render->add_option("--out", render_args.out, "output directory")->required();
  cmd_render->add_option("--pred", render_args.pred,
                         "render this predictions JSON instead of the dataset");

  ConvertArgs convert_args;
  auto* cmd_convert = app.add_subcommand("convert", "map external annotations to the "
                                                    "canonical schema");
  cmd_convert->add_option("--in", convert_args.in, "external JSON file")->required();
  cmd_convert->add_option("--out", convert_args.out, "output dataset JSON")->required();
  cmd_convert->add_option("--bbox-format", convert_args.bbox_format,
                          "box layout in the external file")
      ->check(CLI::IsMember({"xyxy", "xywh"}));
  cmd_convert->footer(
      "Field mapping (external -> canonical):\n"
      "  top level        bare array, or object key \"images\" / \"data\"\n"
      "  image id         \"id\" / \"image_id\" (number or string), else the\n"
      "                   record's position\n"
      "  file name        \"file_name\" / \"filename\" / \"image\"\n"
      "  dimensions       \"width\", \"height\" (required)\n"
      "  style            \"style\" / \"diagram_type\" / \"type\"; unknown or\n"
      "                   missing values fall back to single-line\n"
      "  entities         \"entities\" / \"bboxes\" / \"annotations\"; ids from\n"
      "                   \"id\" / \"entity_id\", else the entity's position\n"
      "  entity box       \"bbox\", interpreted per --bbox-format and clipped\n"
      "                   into the image frame\n"
      "  entity category  \"category\" prefixes mol / txt, text / idt, ident,\n"
      "                   label, or \"category_id\" 1 / 2 / 3\n"
      "  reactions        \"reactions\" with \"reactants\" / \"conditions\" /\n"
      "                   \"products\" entity-id arrays\n"
      "The converted dataset is validated before it is written.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_encode->parsed()) return run_encode(encode_args);
    if (cmd_decode->parsed()) {
      if (decode_args.model_cmd.empty() == decode_args.replay.empty()) {
        std::cerr << "rxnseq decode: exactly one of --model-cmd / --replay is required\n";
        return 2;
      }
      return run_decode(decode_args);
    }
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_augment->parsed()) return run_augment(augment_args);
    if (cmd_stats->parsed()) return run_stats(stats_args);
    if (cmd_split->parsed()) return run_split(split_args);
    if (cmd_render->parsed()) return run_render(render_args);
    if (cmd_convert->parsed()) return run_convert(convert_args);
  } catch (const bridge::BridgeError& e) {
    std::cerr << "rxnseq: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "rxnseq: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rxnseq: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rxnseq: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
