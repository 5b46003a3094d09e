/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// dramnet: generate, train, evaluate, authenticate, export, inspect.
//
// Exit codes: 0 ok/accept, 1 reject, 2 usage, 3 I/O, 4 training contract,
// 5 split-seed mismatch. JSON goes to stdout, progress to stderr.

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dramnet/dramnet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kReject = 1, kUsage = 2, kIo = 3, kContract = 4, kSplitMismatch = 5 };

struct ExitError : std::runtime_error {
  ExitError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
  int code;
};

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& p) { return sha256_hex(dramnet::io::read_file_bytes(p)); }

// One per invocation. No timestamps, so reruns produce identical manifests.
struct RunManifest {
  std::string command;
  json config = json::object();
  json seeds = json::object();
  json inputs = json::object();
  std::map<std::string, std::string> outputs;  // name -> sha256

  void add_output(const std::string& name, const fs::path& path) { outputs[name] = sha256_file(path); }

  json to_json() const {
    return {{"tool", "dramnet"}, {"version", std::string(dramnet::kVersion)}, {"command", command},
            {"config", config}, {"seeds", seeds}, {"inputs", inputs}, {"outputs", outputs}};
  }
};

void emit_manifest(const RunManifest& m, const std::optional<fs::path>& path) {
  const std::string text = m.to_json().dump(2) + "\n";
  if (path) {
    dramnet::io::write_text_file(*path, text);
  } else {
    std::cerr << "run manifest: " << m.to_json().dump() << "\n";
  }
}

void configure_threads() {
  const char* env = std::getenv("DRAMNET_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ExitError(kUsage, std::string("DRAMNET_THREADS must be a positive integer, got '") + env + "'");
  Eigen::setNbThreads(static_cast<int>(n));
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

std::vector<dramnet::sim::Condition> parse_conditions(const std::vector<std::string>& names) {
  std::vector<dramnet::sim::Condition> out;
  for (const auto& n : names) {
    // name or name:magnitude
    const auto colon = n.find(':');
    dramnet::sim::Condition c;
    c.kind = dramnet::sim::parse_condition(n.substr(0, colon));
    if (colon != std::string::npos) {
      try {
        c.magnitude = std::stod(n.substr(colon + 1));
      } catch (const std::exception&) {
        throw dramnet::ParameterError("bad condition magnitude in '" + n + "'");
      }
    }
    out.push_back(c);
  }
  return out;
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  std::uint32_t devices = 3;
  std::vector<std::string> conditions;
  std::uint32_t per_condition = 10;
  std::size_t rows = 1024, cols = 1024;
  std::uint64_t seed = 7;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  dramnet::sim::DatasetSpec spec;
  spec.n_devices = a.devices;
  if (!a.conditions.empty()) spec.conditions = parse_conditions(a.conditions);
  spec.per_condition = a.per_condition;
  spec.rows = a.rows;
  spec.cols = a.cols;
  spec.master_seed = a.seed;
  std::cerr << "generating " << spec.n_devices * spec.conditions.size() * spec.per_condition
            << " measurements of " << spec.rows << "x" << spec.cols << "\n";
  const auto ds = dramnet::sim::generate_dataset(spec);
  const fs::path out(a.out);
  const auto manifest = dramnet::io::write_dataset(ds, out);

  RunManifest run;
  run.command = "gen";
  run.config = spec;
  run.seeds = {{"master_seed", spec.master_seed}};
  run.add_output("manifest.json", out / "manifest.json");
  for (const auto& r : manifest.records) run.add_output(r.file, out / r.file);
  emit_manifest(run, out / "gen.run.json");

  std::cout << json{{"out", a.out}, {"measurements", ds.measurements.size()},
                    {"manifest_sha256", run.outputs["manifest.json"]}}.dump(2) << "\n";
  return kOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data, out;
  dramnet::train::TrainConfig cfg;
  std::string optimizer = "adam";
  std::optional<double> lr;
};

std::vector<dramnet::imaging::FingerprintImage> images_for(const dramnet::sim::Dataset& ds,
                                                           const std::vector<std::size_t>& idx) {
  return dramnet::pipeline::to_images(ds, idx);
}

int cmd_train(TrainArgs a) {
  auto& cfg = a.cfg;
  cfg.optimizer = dramnet::train::parse_optimizer(a.optimizer);
  cfg.lr0 = a.lr;
  cfg.validate();
  const auto ds = dramnet::io::read_dataset(a.data);
  std::size_t n_classes = ds.spec.n_devices;
  const auto split = dramnet::train::split_dataset(ds, cfg.split_ratio, cfg.split_seed);
  const auto train_imgs = images_for(ds, split.train);
  const auto test_imgs = images_for(ds, split.test);

  const auto arch = dramnet::train::preset_for(cfg.arch, cfg.input_size, n_classes);
  dramnet::nn::infer_shapes(arch);
  auto model = dramnet::nn::build_model<float>(arch, cfg.seed);
  std::cerr << "training " << arch.name << " @" << cfg.input_size << " on " << train_imgs.size()
            << " measurements (" << (cfg.augment ? "augmented" : "no augmentation") << "), "
            << test_imgs.size() << " held out\n";

  dramnet::train::TrainHooks hooks;
  hooks.on_epoch = [&](const dramnet::train::EpochRecord& e) {
    std::fprintf(stderr, "epoch %3zu  train_acc %.4f  test_acc %s  %.1fs\n", e.epoch + 1, e.train_acc,
                 e.test_acc ? std::to_string(*e.test_acc).c_str() : "-", e.seconds);
  };
  const auto result = dramnet::train::train<float>(std::move(model), train_imgs, test_imgs, cfg, hooks);

  const fs::path out(a.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw dramnet::IoError("cannot create " + out.string() + ": " + ec.message());
  dramnet::nn::save_model(result.model, out / "model.drnw");
  dramnet::io::write_text_file(out / "history.csv", dramnet::train::history_csv(result.history));

  RunManifest run;
  run.command = "train";
  run.config = cfg;
  run.seeds = {{"seed", cfg.seed}, {"split_seed", cfg.split_seed}, {"dataset_master_seed", ds.spec.master_seed}};
  run.inputs = {{"data", a.data}, {"manifest_sha256", sha256_file(fs::path(a.data) / "manifest.json")}};
  run.add_output("model.drnw", out / "model.drnw");
  run.add_output("history.csv", out / "history.csv");
  emit_manifest(run, out / "train.run.json");

  json summary = {{"model", (out / "model.drnw").string()},
                  {"train_images", result.history.train_images},
                  {"batches_per_epoch", result.history.batches_per_epoch},
                  {"steps", result.history.steps.size()}};
  if (!result.history.epochs.empty()) {
    const auto& last = result.history.epochs.back();
    summary["train_acc"] = last.train_acc;
    summary["test_acc"] = last.test_acc ? json(*last.test_acc) : json(nullptr);
  }
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string data, model, out;
  std::optional<std::uint64_t> split_seed;
  std::optional<double> split_ratio;
  bool force = false;
};

int cmd_eval(const EvalArgs& a) {
  const fs::path model_path(a.model);
  std::uint64_t split_seed = 1;
  double split_ratio = dramnet::train::TrainConfig{}.split_ratio;
  const fs::path train_run = model_path.parent_path() / "train.run.json";
  if (fs::exists(train_run)) {
    const auto bytes = dramnet::io::read_file_bytes(train_run);
    const auto j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded()) throw dramnet::FormatError(train_run.string() + ": not JSON");
    const auto& c = j.at("config");
    const std::uint64_t trained_seed = c.value("split_seed", split_seed);
    const double trained_ratio = c.value("split_ratio", split_ratio);
    bool mismatch = false;
    if (a.split_seed && *a.split_seed != trained_seed) {
      std::cerr << "warning: --split-seed " << *a.split_seed << " differs from training split seed " << trained_seed
                << "\n";
      mismatch = true;
    }
    if (a.split_ratio && *a.split_ratio != trained_ratio) {
      std::cerr << "warning: --split-ratio " << *a.split_ratio << " differs from training split ratio "
                << trained_ratio << "\n";
      mismatch = true;
    }
    if (mismatch && !a.force) throw ExitError(kSplitMismatch, "held-out set would overlap training data (use --force)");
    split_seed = a.split_seed.value_or(trained_seed);
    split_ratio = a.split_ratio.value_or(trained_ratio);
  } else {
    std::cerr << "warning: no train.run.json next to the model; using the given split\n";
    split_seed = a.split_seed.value_or(split_seed);
    split_ratio = a.split_ratio.value_or(split_ratio);
  }

  auto model = dramnet::nn::load_model<float>(model_path);
  const auto ds = dramnet::io::read_dataset(a.data);
  const auto split = dramnet::train::split_dataset(ds, split_ratio, split_seed);
  const auto test_imgs = images_for(ds, split.test);
  const auto ev = dramnet::eval::evaluate(model, std::span<const dramnet::imaging::FingerprintImage>(test_imgs));

  const fs::path out(a.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw dramnet::IoError("cannot create " + out.string() + ": " + ec.message());
  const std::string metrics = dramnet::eval::metrics_json(ev.report, ev.rocs).dump(2) + "\n";
  dramnet::io::write_text_file(out / "metrics.json", metrics);
  dramnet::io::write_text_file(out / "roc.csv", dramnet::eval::roc_csv(ev.rocs));
  dramnet::io::write_text_file(out / "confusion.csv", dramnet::eval::confusion_csv(ev.report.counts));

  RunManifest run;
  run.command = "eval";
  run.config = {{"split_ratio", split_ratio}, {"split_seed", split_seed}, {"force", a.force}};
  run.seeds = {{"split_seed", split_seed}, {"model_init_seed", model.init_seed()}};
  run.inputs = {{"data", a.data},
                {"model", a.model},
                {"model_sha256", sha256_file(model_path)},
                {"manifest_sha256", sha256_file(fs::path(a.data) / "manifest.json")}};
  run.add_output("metrics.json", out / "metrics.json");
  run.add_output("roc.csv", out / "roc.csv");
  run.add_output("confusion.csv", out / "confusion.csv");
  emit_manifest(run, out / "eval.run.json");
  std::cout << metrics;
  return kOk;
}

// --- auth --------------------------------------------------------------------

struct AuthArgs {
  std::string model, measurement;
  double threshold = dramnet::eval::kDefaultThreshold;
  std::optional<std::string> run_manifest;
};

int cmd_auth(const AuthArgs& a) {
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw dramnet::ParameterError("--threshold must be in [0, 1]");
  auto model = dramnet::nn::load_model<float>(a.model);
  dramnet::sim::Measurement m;
  m.bits = dramnet::io::read_measurement(a.measurement);
  const auto d = dramnet::eval::authenticate(model, m, a.threshold);

  RunManifest run;
  run.command = "auth";
  run.config = {{"threshold", a.threshold}};
  run.inputs = {{"model", a.model}, {"model_sha256", sha256_file(a.model)},
                {"measurement", a.measurement}, {"measurement_sha256", sha256_file(a.measurement)}};
  emit_manifest(run, a.run_manifest ? std::optional<fs::path>(*a.run_manifest) : std::nullopt);
  std::cout << dramnet::eval::decision_json(d).dump(2) << "\n";
  return d.accepted ? kOk : kReject;
}

// --- export-image ------------------------------------------------------------

struct ExportArgs {
  std::string measurement, image;
  std::optional<std::size_t> size;
};

int cmd_export(const ExportArgs& a) {
  dramnet::sim::Measurement m;
  m.bits = dramnet::io::read_measurement(a.measurement);
  auto img = dramnet::imaging::to_image(m);
  if (a.size) img = dramnet::imaging::downscale(img, *a.size, *a.size);
  dramnet::imaging::export_pgm(img, a.image);

  RunManifest run;
  run.command = "export-image";
  run.config = {{"size", a.size ? json(*a.size) : json(nullptr)}};
  run.inputs = {{"measurement", a.measurement}, {"measurement_sha256", sha256_file(a.measurement)}};
  run.add_output(fs::path(a.image).filename().string(), a.image);
  emit_manifest(run, fs::path(a.image + ".run.json"));
  std::cout << json{{"image", a.image}, {"rows", img.rows}, {"cols", img.cols}}.dump(2) << "\n";
  return kOk;
}

// --- shapes ------------------------------------------------------------------

struct ShapesArgs {
  std::string arch = "dramnet";
  std::size_t input = dramnet::train::kFullInput;
  bool as_json = false;
  std::optional<std::string> run_manifest;
};

int cmd_shapes(const ShapesArgs& a) {
  const auto spec = dramnet::train::preset_for(a.arch, a.input);
  const auto table = dramnet::nn::infer_shapes(spec);
  const auto blocks = table.blocks();
  // The reference table describes the full-size network only.
  const bool annotate = a.arch == "dramnet" && a.input == dramnet::train::kFullInput;
  const auto note_for = [&](std::size_t row) -> std::string {
    if (!annotate) return "";
    for (const auto& p : dramnet::train::kReferenceDramnetTable)
      if (p.row == row) return std::string(p.note);
    return "";
  };

  if (a.as_json) {
    json j = dramnet::nn::to_json(table);
    json rows = json::array();
    for (const auto& b : blocks) {
      json r = {{"block", dramnet::nn::block_name(b.row)}, {"type", b.type}, {"kernel", b.kernel},
                {"stride", b.stride}, {"count", b.count}, {"input", dramnet::nn::format_dims(b.input)},
                {"flat_input", b.input.flat()}, {"params", b.params}};
      if (const auto n = note_for(b.row); !n.empty()) r["note"] = n;
      rows.push_back(r);
    }
    j["blocks"] = rows;
    std::cout << j.dump(2) << "\n";
  } else {
    std::vector<std::vector<std::string>> cells = {{"Layer", "Type", "Kernel", "Stride", "Count", "Input", "Params"}};
    for (const auto& b : blocks)
      cells.push_back({dramnet::nn::block_name(b.row), b.type, b.kernel, b.stride, b.count,
                       dramnet::nn::format_dims(b.input), std::to_string(b.params)});
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells)
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::ostringstream os;
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << row[i];
        if (i + 1 < row.size()) os << std::string(width[i] - row[i].size() + 2, ' ');
      }
      os << "\n";
    }
    os << "total parameters: " << table.total_params << "\n";
    for (const auto& b : blocks)
      if (const auto n = note_for(b.row); !n.empty()) os << "note " << dramnet::nn::block_name(b.row) << ": " << n << "\n";
    std::cout << os.str();
  }

  RunManifest run;
  run.command = "shapes";
  run.config = {{"arch", a.arch}, {"input", a.input}, {"json", a.as_json}};
  emit_manifest(run, a.run_manifest ? std::optional<fs::path>(*a.run_manifest) : std::nullopt);
  return kOk;
}

int map_exception() {
  try {
    throw;
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const dramnet::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const dramnet::FormatError& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kIo;
  } catch (const dramnet::ContractError& e) {
    std::cerr << "training contract: " << e.what() << "\n";
    return kContract;
  } catch (const dramnet::DegenerateInputError& e) {
    std::cerr << "training contract: " << e.what() << "\n";
    return kContract;
  } catch (const dramnet::Error& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad file: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dramnet: DRAM power-up fingerprint toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file; explicit flags take precedence");
  app.set_version_flag("--version", std::string(dramnet::kVersion));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "simulate a dataset of power-up measurements");
  g->add_option("--devices", gen.devices, "number of devices")->capture_default_str();
  g->add_option("--conditions", gen.conditions,
                "operating conditions (nominal, high_temp, low_temp, high_volt, low_volt, aged[:magnitude])")
      ->delimiter(',');
  g->add_option("--per-condition", gen.per_condition)->capture_default_str();
  g->add_option("--rows", gen.rows)->capture_default_str();
  g->add_option("--cols", gen.cols)->capture_default_str();
  g->add_option("--seed", gen.seed, "master seed")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a classifier on a dataset directory");
  t->add_option("--data", tr.data)->required();
  t->add_option("--out", tr.out, "directory for model.drnw, history.csv and train.run.json")->required();
  t->add_option("--arch", tr.cfg.arch)->check(CLI::IsMember({"dramnet", "alexnet-s", "vggnet-s"}))->capture_default_str();
  t->add_option("--optimizer", tr.optimizer)->check(CLI::IsMember({"sgd", "adam"}))->capture_default_str();
  t->add_flag("--augment", tr.cfg.augment, "six-crop augmentation of the training set");
  t->add_option("--input-size", tr.cfg.input_size)->capture_default_str();
  t->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  t->add_option("--seed", tr.cfg.seed, "initialisation, shuffling and dropout seed")->capture_default_str();
  t->add_option("--split-seed", tr.cfg.split_seed)->capture_default_str();
  t->add_option("--split-ratio", tr.cfg.split_ratio)->capture_default_str();
  t->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
  t->add_option("--lr", tr.lr, "initial learning rate (default 0.001 adam, 0.01 sgd)");
  t->add_option("--decay-rate", tr.cfg.decay_rate)->capture_default_str();
  t->add_option("--decay-period", tr.cfg.decay_period)->capture_default_str();
  t->add_option("--momentum", tr.cfg.momentum)->capture_default_str();
  t->add_option("--lambda", tr.cfg.lambda, "L2 weight penalty")->capture_default_str();
  t->add_option("--crop-fraction", tr.cfg.crop_fraction)->capture_default_str();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a model on the held-out split");
  e->add_option("--data", ev.data)->required();
  e->add_option("--model", ev.model)->required();
  e->add_option("--out", ev.out, "directory for metrics.json, roc.csv, confusion.csv")->required();
  e->add_option("--split-seed", ev.split_seed);
  e->add_option("--split-ratio", ev.split_ratio);
  e->add_flag("--force", ev.force, "evaluate even if the split differs from training");

  AuthArgs au;
  auto* u = app.add_subcommand("auth", "accept or reject one measurement");
  u->add_option("--model", au.model)->required();
  u->add_option("--measurement", au.measurement)->required();
  u->add_option("--threshold", au.threshold)->capture_default_str();
  u->add_option("--run-manifest", au.run_manifest, "write the run manifest here instead of stderr");

  ExportArgs ex;
  auto* x = app.add_subcommand("export-image", "convert a measurement to a PGM image");
  x->add_option("measurement", ex.measurement)->required();
  x->add_option("image", ex.image)->required();
  x->add_option("--size", ex.size, "downscale to size x size");

  ShapesArgs sh;
  auto* s = app.add_subcommand("shapes", "print the per-layer shape table");
  s->add_option("--arch", sh.arch)->check(CLI::IsMember({"dramnet", "alexnet-s", "vggnet-s"}))->capture_default_str();
  s->add_option("--input", sh.input)->capture_default_str();
  s->add_flag("--json", sh.as_json);
  s->add_option("--run-manifest", sh.run_manifest, "write the run manifest here instead of stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    configure_threads();
    if (*g) return cmd_gen(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*u) return cmd_auth(au);
    if (*x) return cmd_export(ex);
    if (*s) return cmd_shapes(sh);
  } catch (...) {
    return map_exception();
  }
  return kUsage;
}
