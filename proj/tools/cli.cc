// Copyright 2026 The PANN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pann/errors.h"
#include "pann/infer.h"
#include "pann/io.h"
#include "pann/mse.h"
#include "pann/power_model.h"
#include "pann/quantize.h"
#include "pann/rng.h"
#include "pann/toggle_sim.h"

namespace pann {
namespace {

using nlohmann::json;

// Raised when an analysis finished but its gate did not hold.
class GateFailure : public Error {
 public:
  using Error::Error;
};

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

std::string Fmt(double v) { return FormatDouble(v); }

double RelativeError(double measured, double predicted) {
  return predicted == 0 ? std::abs(measured) : std::abs(measured - predicted) / predicted;
}

QuantScope ParseScope(const std::string& s) {
  return s == "layer" ? QuantScope::kPerLayer : QuantScope::kPerNeuron;
}

// Writes `content` to `path` plus its manifest sidecar, or to stdout when no
// path was given.
void Emit(const Context& ctx, const std::string& path, const std::string& content,
          const std::string& command, const json& config, std::uint64_t seed,
          std::vector<std::string> extra_outputs = {}) {
  if (path.empty()) {
    ctx.out << content;
    return;
  }
  WriteTextFile(path, content);
  RunManifest m;
  m.command = command;
  m.argv = ctx.args;
  m.config = config;
  m.seed = seed;
  m.outputs = {path};
  m.outputs.insert(m.outputs.end(), extra_outputs.begin(), extra_outputs.end());
  WriteTextFile(ManifestPathFor(path), m.ToJson().dump(2) + "\n");
  ctx.out << "wrote " << path << "\n";
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string mult = "booth";
  int b_w = 4;
  int b_x = 4;
  int acc_width = 32;
  bool is_signed = true;
  std::string dist = "uniform";
  std::uint64_t n = 36000;
  std::uint64_t seed = 0;
  std::string out;
};

StreamConfig ToStreamConfig(const SimulateOpts& o) {
  StreamConfig cfg;
  cfg.multiplier = o.mult == "serial" ? MultiplierKind::kSerialShiftAdd
                                      : MultiplierKind::kBoothRadix2;
  cfg.b_w = o.b_w;
  cfg.b_x = o.b_x;
  cfg.acc_width = o.acc_width;
  cfg.is_signed = o.is_signed;
  cfg.distribution =
      o.dist == "gaussian" ? Distribution::kClippedGaussian : Distribution::kUniform;
  cfg.n_samples = o.n;
  cfg.seed = o.seed;
  return cfg;
}

struct ComponentRow {
  std::string name;
  double measured;
  double predicted;
};

std::vector<ComponentRow> CompareComponents(const ToggleReport& r,
                                            const MacPowerBreakdown& p) {
  return {{"mult_input_a", r.mult_input_a, p.mult_input_a},
          {"mult_input_b", r.mult_input_b, p.mult_input_b},
          {"mult_internal", r.mult_internal, p.mult_internal},
          {"mult_total", r.mult_total, p.mult},
          {"acc_input", r.acc_input, p.acc_input},
          {"acc_sum", r.acc_sum, p.acc_sum},
          {"ff", r.ff, p.ff},
          {"acc_total", r.acc_total, p.acc},
          {"total", r.total, p.total}};
}

int CmdSimulate(const Context& ctx, const SimulateOpts& o) {
  const StreamConfig cfg = ToStreamConfig(o);
  const ToggleReport rep = RunMacStream(cfg);
  const MacPowerBreakdown pred = MacPower(o.b_w, o.b_x, o.acc_width, o.is_signed);
  CsvWriter csv("toggle-report", {"component", "measured_avg", "predicted", "relative_error"});
  for (const ComponentRow& c : CompareComponents(rep, pred)) {
    csv.Row({c.name, Fmt(c.measured), Fmt(c.predicted),
             Fmt(RelativeError(c.measured, c.predicted))});
  }
  const json config = {{"mult", o.mult},   {"b_w", o.b_w},        {"b_x", o.b_x},
                       {"B", o.acc_width}, {"signed", o.is_signed}, {"dist", o.dist},
                       {"n", o.n}};
  Emit(ctx, o.out, csv.str(), "simulate", config, o.seed);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate-models

struct ValidateOpts {
  std::string bits = "2..8";
  int acc_width = 32;
  std::uint64_t n = 36000;
  std::uint64_t seed = 0;
  std::string out;
};

int CmdValidateModels(const Context& ctx, const ValidateOpts& o) {
  const IntRange bits = IntRange::Parse(o.bits);
  CsvWriter csv("model-validation",
                {"sweep", "b_w", "b_x", "signed", "component", "measured_avg",
                 "predicted", "relative_error", "tolerance", "pass"});
  std::vector<std::string> failures;
  auto add = [&](const std::string& sweep, const StreamConfig& cfg,
                 const ComponentRow& c, std::optional<double> tol) {
    const double rel = RelativeError(c.measured, c.predicted);
    std::string pass = "n/a";
    if (tol) {
      pass = rel <= *tol ? "yes" : "no";
      if (pass == "no") {
        failures.push_back(fmt::format("{} b_w={} b_x={} {} {}: measured {:.4f}, predicted {:.4f}",
                                       sweep, cfg.b_w, cfg.b_x,
                                       cfg.is_signed ? "signed" : "unsigned", c.name,
                                       c.measured, c.predicted));
      }
    }
    csv.Row({sweep, std::to_string(cfg.b_w), std::to_string(cfg.b_x),
             cfg.is_signed ? "true" : "false", c.name, Fmt(c.measured), Fmt(c.predicted),
             Fmt(rel), tol ? Fmt(*tol) : "", pass});
  };

  for (bool is_signed : {true, false}) {
    for (int b : bits.values()) {
      StreamConfig cfg;
      cfg.b_w = cfg.b_x = b;
      cfg.acc_width = o.acc_width;
      cfg.is_signed = is_signed;
      cfg.n_samples = o.n;
      cfg.seed = o.seed;
      const ToggleReport rep = RunMacStream(cfg);
      for (const ComponentRow& c :
           CompareComponents(rep, MacPower(b, b, o.acc_width, is_signed))) {
        std::optional<double> tol;
        if (is_signed) {
          if (c.name == "mult_input_a" || c.name == "mult_input_b") tol = 0.05;
          if (c.name == "mult_internal" || c.name == "acc_sum" || c.name == "ff") tol = 0.15;
          if (c.name == "acc_input") tol = 0.07;
        } else if (c.name == "acc_input") {
          tol = 0.15;
        }
        add("square", cfg, c, tol);
      }
    }
  }
  const int b_x = bits.hi;
  for (bool is_signed : {true, false}) {
    for (int b_w : bits.values()) {
      StreamConfig cfg;
      cfg.b_w = b_w;
      cfg.b_x = b_x;
      cfg.acc_width = std::max(o.acc_width, b_w + b_x);
      cfg.is_signed = is_signed;
      cfg.n_samples = o.n;
      cfg.seed = o.seed;
      const ToggleReport rep = RunMacStream(cfg);
      const MacPowerBreakdown p = MacPower(b_w, b_x, cfg.acc_width, is_signed);
      std::optional<double> tol;
      if (is_signed) tol = 0.10;
      add("mixed", cfg, {"mult_total", rep.mult_total, p.mult}, tol);
    }
  }
  const json config = {{"bits", o.bits}, {"B", o.acc_width}, {"n", o.n}};
  Emit(ctx, o.out, csv.str(), "validate-models", config, o.seed);
  if (!failures.empty()) {
    ctx.err << failures.size() << " row(s) outside tolerance:\n";
    for (const std::string& f : failures) ctx.err << "  " << f << "\n";
    return kExitGateFailed;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// quantize

struct QuantizeOpts {
  std::string model;
  std::string mode = "pann";
  std::optional<double> budget;
  std::optional<int> bits;
  std::optional<int> bx_tilde;
  std::optional<int> baseline_bits;
  std::string scope = "neuron";
  std::string calib;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Split forward pass compared against the dense layers on random
// non-negative inputs.
double SplitEquivalenceError(const Model& model, const std::vector<SplitLayer>& split,
                             std::uint64_t seed) {
  Rng rng = MakeRng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0;
  for (int t = 0; t < 256; ++t) {
    std::vector<double> x(model.input_dim());
    for (double& v : x) v = unit(rng);
    std::vector<double> direct = x;
    std::vector<double> via = x;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      direct = model.layers[l].Apply(direct);
      const SplitOutputs s = ApplySplit(split[l], via);
      via = Recombine(s.y_plus, s.y_minus);
      if (split[l].relu) {
        for (double& v : via) v = std::max(v, 0.0);
      }
    }
    double norm = 0;
    double diff = 0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      norm = std::max(norm, std::abs(direct[i]));
      diff = std::max(diff, std::abs(direct[i] - via[i]));
    }
    worst = std::max(worst, norm == 0 ? diff : diff / norm);
  }
  return worst;
}

int CmdQuantize(const Context& ctx, const QuantizeOpts& o) {
  const Model model = LoadModel(o.model);
  json config = {{"model", o.model}, {"mode", o.mode}, {"scope", o.scope}};
  if (o.out.empty()) throw ValidationError("--out is required");

  if (o.mode == "unsigned-split") {
    if (!o.seed) throw ValidationError("--seed is required for the equivalence check");
    std::vector<SplitLayer> split;
    for (const DenseLayer& layer : model.layers) split.push_back(SplitSigns(layer));
    const double err = SplitEquivalenceError(model, split, *o.seed);
    json j = ToJson(split, model.name);
    j["equivalence_check"] = {{"inputs", 256}, {"max_relative_error", err}};
    Emit(ctx, o.out, j.dump(2) + "\n", "quantize", config, *o.seed);
    if (err > 1e-9) {
      ctx.err << "split model deviates from the dense model: " << err << "\n";
      return kExitGateFailed;
    }
    return kExitOk;
  }

  Calibration calib;
  calib.input_max.assign(model.layers.size(), 1.0);
  if (!o.calib.empty()) {
    calib = Calibrate(model, LoadDataset(o.calib));
    config["calib"] = o.calib;
  }

  Backend backend;
  int baseline = 0;
  if (o.mode == "ruq") {
    if (!o.bits) throw ValidationError("--mode ruq needs --bits");
    if (o.budget) throw ValidationError("--mode ruq takes --bits, not --budget");
    backend = Backend::QuantMul(*o.bits, *o.bits);
    baseline = *o.bits;
    config["bits"] = *o.bits;
  } else if (o.mode == "pann") {
    if (o.budget.has_value() == o.bits.has_value()) {
      throw ValidationError("--mode pann needs exactly one of --budget and --bits");
    }
    const double p = o.budget ? *o.budget : UnsignedMacBudget(*o.bits).p;
    if (!(p > 0)) throw ValidationError("budget must be positive");
    int bt = 0;
    if (o.bx_tilde) {
      bt = *o.bx_tilde;
      EqualPowerPoints({p}, {bt, bt});
    } else {
      bt = OptimalBxTilde(1, 1, 1, p, {2, 8}).bx_tilde;
    }
    const double r = p / bt - 0.5;
    backend = Backend::PannAdd(bt, r, false);
    if (o.baseline_bits) {
      baseline = *o.baseline_bits;
    } else if (o.bits) {
      baseline = *o.bits;
    } else {
      baseline = static_cast<int>(std::ceil(-4.0 + std::sqrt(16.0 + 2.0 * p) - 1e-9));
      baseline = std::max(baseline, 1);
    }
    config["budget"] = p;
    config["bx_tilde"] = bt;
    config["r"] = r;
  } else {
    throw ValidationError(fmt::format("unknown mode '{}'", o.mode));
  }
  backend.scope = ParseScope(o.scope);
  config["baseline_bits"] = baseline;

  const QuantizedModel qm = QuantizeModel(model, calib, backend);
  const int act_bits = backend.kind == BackendKind::kPannAdd ? backend.bx_tilde : backend.b_x;
  const double latency = backend.kind == BackendKind::kPannAdd ? backend.r : 1.0;
  const StorageReport s = MakeStorageReport(qm.MaxAbsQ(), baseline, act_bits, latency);
  json storage = {{"format_version", kFormatVersion},
                  {"b_r", s.b_r},
                  {"activation_mem_factor", s.activation_mem_factor},
                  {"weight_mem_factor", s.weight_mem_factor},
                  {"latency_factor", s.latency_factor},
                  {"achieved_addition_factor", qm.MeanAdditionFactor()},
                  {"max_abs_q", qm.MaxAbsQ()}};
  const std::string storage_path = o.out + ".storage.json";
  WriteTextFile(storage_path, storage.dump(2) + "\n");
  json j = ToJson(qm, model.name);
  j["storage"] = storage;
  Emit(ctx, o.out, j.dump(2) + "\n", "quantize", config, o.seed.value_or(0), {storage_path});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mse

struct MseOpts {
  std::string curve = "ratio";
  std::string dist = "uniform";
  std::string bits = "2..8";
  std::string brange = "2..8";
  int d = 1024;
  std::uint64_t trials = 4000;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int CmdMse(const Context& ctx, const MseOpts& o) {
  const IntRange bits = IntRange::Parse(o.bits);
  const IntRange cand = IntRange::Parse(o.brange);
  json config = {{"curve", o.curve}, {"dist", o.dist}, {"bits", o.bits},
                 {"brange", o.brange}, {"d", o.d}};
  std::vector<RatioPoint> curve;
  if (o.dist == "uniform") {
    curve = RatioCurve(o.d, 1.0, 1.0, bits.values(), cand);
  } else {
    if (!o.seed) throw ValidationError("--seed is required for --dist gaussian");
    DistributionModel model;
    model.kind = DistributionModel::Kind::kGaussianReLU;
    curve = MonteCarloRatioCurve(model, o.d, bits.values(), cand, o.trials, *o.seed);
    config["trials"] = o.trials;
  }
  CsvWriter csv("mse-ratio", {"b", "P", "bx_tilde", "mse_ruq", "mse_pann", "ratio"});
  for (const RatioPoint& p : curve) {
    csv.Row({std::to_string(p.b), Fmt(p.budget), std::to_string(p.bx_tilde), Fmt(p.mse_ruq),
             Fmt(p.mse_pann), Fmt(p.ratio)});
  }
  Emit(ctx, o.out, csv.str(), "mse", config, o.seed.value_or(0));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// budget-search / tradeoff

struct SearchOpts {
  std::string model;
  std::string data;
  std::string split;
  std::string calib_split = "calib";
  double budget = 0;
  std::string brange = "2..8";
  std::string scope = "neuron";
  std::size_t calib_samples = 0;
  std::optional<std::uint64_t> seed;
  int baseline_bits = 2;
  std::string out;
};

struct Loaded {
  Model model;
  Dataset data;
  Calibration calib;
};

Loaded LoadForSearch(const SearchOpts& o) {
  if (o.split == o.calib_split) {
    throw ValidationError("evaluation split and calibration split must differ");
  }
  if (o.calib_samples > 0 && !o.seed) {
    throw ValidationError("--seed is required with --calib-samples");
  }
  Loaded l{LoadModel(o.model), LoadDataset(o.data + "_" + o.split + ".csv"), {}};
  l.data.ValidateFor(l.model);
  l.calib = Calibrate(l.model, LoadDataset(o.data + "_" + o.calib_split + ".csv"),
                      {o.calib_samples, o.seed.value_or(0)});
  return l;
}

json SearchConfig(const SearchOpts& o) {
  return {{"model", o.model},   {"data", o.data},       {"split", o.split},
          {"calib_split", o.calib_split}, {"budget", o.budget}, {"brange", o.brange},
          {"scope", o.scope},   {"calib_samples", o.calib_samples}};
}

json RowJson(const BudgetRow& r) {
  return {{"bx_tilde", r.bx_tilde},
          {"r", r.r},
          {"accuracy", r.accuracy},
          {"addition_factor", r.addition_factor},
          {"max_abs_q", r.max_abs_q},
          {"predicted_power", r.predicted_power},
          {"measured_power", r.measured_power}};
}

int CmdBudgetSearch(const Context& ctx, const SearchOpts& o) {
  const IntRange range = IntRange::Parse(o.brange);
  const Loaded l = LoadForSearch(o);
  const BudgetSearchResult res =
      BudgetSearch(l.model, l.data, l.calib, o.budget, range, ParseScope(o.scope));
  json j = {{"format_version", kFormatVersion}, {"budget", res.budget},
            {"split", o.split}, {"omitted", res.omitted}};
  j["rows"] = json::array();
  for (const BudgetRow& r : res.rows) j["rows"].push_back(RowJson(r));
  j["chosen"] = RowJson(res.chosen());
  Emit(ctx, o.out, j.dump(2) + "\n", "budget-search", SearchConfig(o), o.seed.value_or(0));
  return kExitOk;
}

int CmdTradeoff(const Context& ctx, const SearchOpts& o) {
  const IntRange range = IntRange::Parse(o.brange);
  const Loaded l = LoadForSearch(o);
  const std::vector<TradeoffRow> rows = TradeoffTable(
      l.model, l.data, l.calib, o.budget, o.baseline_bits, range, ParseScope(o.scope));
  CsvWriter csv("tradeoff",
                {"bx_tilde", "latency", "b_r", "act_mem", "weight_mem", "accuracy"});
  for (const TradeoffRow& r : rows) {
    csv.Row({std::to_string(r.bx_tilde), Fmt(r.latency), std::to_string(r.b_r),
             Fmt(r.act_mem), Fmt(r.weight_mem), Fmt(r.accuracy)});
  }
  json config = SearchConfig(o);
  config["baseline_bits"] = o.baseline_bits;
  Emit(ctx, o.out, csv.str(), "tradeoff", config, o.seed.value_or(0));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int CmdReplay(const Context& ctx, const std::string& path) {
  json j;
  try {
    j = json::parse(ReadTextFile(path));
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  const RunManifest m = RunManifest::FromJson(j);
  if (m.argv.empty() || m.argv.front() == "replay") {
    throw ValidationError(fmt::format("{}: manifest does not record a command", path));
  }
  if (m.version != PANN_VERSION) {
    ctx.err << "warning: manifest written by version " << m.version << ", running "
            << PANN_VERSION << "\n";
  }
  return Dispatch(m.argv, ctx.out, ctx.err);
}

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-aware neural network toolkit: toggle simulation, power "
               "models, quantization and budget search.",
               "pann"};
  app.set_version_flag("--version", PANN_VERSION);
  app.require_subcommand(1);
  const auto widths = CLI::Range(1, 31);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a MAC stream and count bit toggles");
  c_sim->add_option("--mult", sim.mult)->check(CLI::IsMember({"booth", "serial"}))->capture_default_str();
  c_sim->add_option("--bw", sim.b_w)->check(widths)->capture_default_str();
  c_sim->add_option("--bx", sim.b_x)->check(widths)->capture_default_str();
  c_sim->add_option("--B", sim.acc_width)->check(CLI::Range(2, 63))->capture_default_str();
  c_sim->add_flag("--signed,!--unsigned", sim.is_signed, "Two's-complement operands")
      ->capture_default_str();
  c_sim->add_option("--dist", sim.dist)->check(CLI::IsMember({"uniform", "gaussian"}))->capture_default_str();
  c_sim->add_option("--n", sim.n, "Operations to simulate")->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->required();
  c_sim->add_option("--out", sim.out, "CSV path (stdout if omitted)");

  ValidateOpts val;
  auto* c_val = app.add_subcommand("validate-models", "Sweep simulations against the closed-form models");
  c_val->add_option("--bits", val.bits)->capture_default_str();
  c_val->add_option("--B", val.acc_width)->check(CLI::Range(2, 63))->capture_default_str();
  c_val->add_option("--n", val.n)->capture_default_str();
  c_val->add_option("--seed", val.seed)->required();
  c_val->add_option("--out", val.out);

  QuantizeOpts qo;
  auto* c_q = app.add_subcommand("quantize", "Quantize or sign-split a model");
  c_q->add_option("--model", qo.model)->required();
  c_q->add_option("--mode", qo.mode)->check(CLI::IsMember({"pann", "ruq", "unsigned-split"}))->capture_default_str();
  c_q->add_option("--budget", qo.budget, "Power budget P in bit flips per element");
  c_q->add_option("--bits", qo.bits, "Bit width b; for pann mode the budget of a b-bit unsigned MAC")->check(widths);
  c_q->add_option("--bx-tilde", qo.bx_tilde)->check(widths);
  c_q->add_option("--baseline-bits", qo.baseline_bits)->check(widths);
  c_q->add_option("--scope", qo.scope)->check(CLI::IsMember({"neuron", "layer"}))->capture_default_str();
  c_q->add_option("--calib", qo.calib, "Calibration CSV for activation ranges");
  c_q->add_option("--seed", qo.seed);
  c_q->add_option("--out", qo.out)->required();

  MseOpts mo;
  auto* c_mse = app.add_subcommand("mse", "Quantization-error ratio curves");
  c_mse->add_option("--curve", mo.curve)->check(CLI::IsMember({"ratio"}))->capture_default_str();
  c_mse->add_option("--dist", mo.dist)->check(CLI::IsMember({"uniform", "gaussian"}))->capture_default_str();
  c_mse->add_option("--bits", mo.bits)->capture_default_str();
  c_mse->add_option("--brange", mo.brange)->capture_default_str();
  c_mse->add_option("--d", mo.d)->check(CLI::PositiveNumber)->capture_default_str();
  c_mse->add_option("--trials", mo.trials)->check(CLI::Range(1000, 100000000))->capture_default_str();
  c_mse->add_option("--seed", mo.seed);
  c_mse->add_option("--out", mo.out);

  SearchOpts so;
  auto add_search = [&](CLI::App* c) {
    c->add_option("--model", so.model)->required();
    c->add_option("--data", so.data, "Dataset prefix; files are <prefix>_<split>.csv")->required();
    c->add_option("--split", so.split, "Split to evaluate on")->required();
    c->add_option("--calib-split", so.calib_split)->capture_default_str();
    c->add_option("--budget", so.budget)->required();
    c->add_option("--brange", so.brange)->capture_default_str();
    c->add_option("--scope", so.scope)->check(CLI::IsMember({"neuron", "layer"}))->capture_default_str();
    c->add_option("--calib-samples", so.calib_samples, "Random calibration subset size (0 = all)")
        ->capture_default_str();
    c->add_option("--seed", so.seed);
    c->add_option("--out", so.out);
  };
  auto* c_bs = app.add_subcommand("budget-search", "Pick activation width and addition factor for a budget");
  add_search(c_bs);
  auto* c_to = app.add_subcommand("tradeoff", "List every configuration meeting a budget");
  add_search(c_to);
  c_to->add_option("--baseline-bits", so.baseline_bits)->check(widths)->capture_default_str();

  std::string manifest;
  auto* c_rep = app.add_subcommand("replay", "Re-run a command from its manifest");
  c_rep->add_option("--manifest", manifest)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  const Context ctx{args, out, err};
  try {
    if (c_sim->parsed()) return CmdSimulate(ctx, sim);
    if (c_val->parsed()) return CmdValidateModels(ctx, val);
    if (c_q->parsed()) return CmdQuantize(ctx, qo);
    if (c_mse->parsed()) return CmdMse(ctx, mo);
    if (c_bs->parsed()) return CmdBudgetSearch(ctx, so);
    if (c_to->parsed()) return CmdTradeoff(ctx, so);
    if (c_rep->parsed()) return CmdReplay(ctx, manifest);
  } catch (const InfeasibleBudget& e) {
    err << "error: " << e.what() << "\n";
    return kExitGateFailed;
  } catch (const GateFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitGateFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Dispatch(args, out, err);
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace pann
