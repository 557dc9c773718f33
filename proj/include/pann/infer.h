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

#ifndef PANN_INFER_H_
#define PANN_INFER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pann/power_model.h"
#include "pann/quantize.h"
#include "pann/toggle_sim.h"

namespace pann {

// Dense network: ReLU on every hidden layer, linear logits at the end.
struct Model {
  std::string name;
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  // Throws ValidationError on inconsistent shapes or activation layout.
  void Validate() const;
};

struct Dataset {
  Matrix samples;  // one row per sample, features in [0, 1]
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  // Throws ValidationError on dimension or label mismatch against `model`.
  void ValidateFor(const Model& model) const;
};

enum class BackendKind { kFloatRef, kQuantMul, kPannAdd };

struct Backend {
  BackendKind kind = BackendKind::kFloatRef;
  int b_x = 8;
  int b_w = 8;
  int bx_tilde = 8;
  double r = 1;
  bool count_toggles = false;
  QuantScope scope = QuantScope::kPerNeuron;
  int acc_width = 32;

  static Backend FloatRef();
  static Backend QuantMul(int b_x, int b_w);
  static Backend PannAdd(int bx_tilde, double r, bool count_toggles);
  std::string Describe() const;
};

// Largest input seen by each layer on the calibration samples.
struct Calibration {
  std::vector<double> input_max;
};

struct CalibrationOptions {
  std::size_t max_samples = 0;  // 0 = use every sample
  std::uint64_t seed = 0;       // picks the subset when max_samples is set
};

Calibration Calibrate(const Model& model, const Dataset& calib,
                      const CalibrationOptions& options = {});

struct QuantizedLayer {
  std::vector<QuantizedTensor> rows;  // signed weight integers per neuron
  std::vector<double> bias;
  bool relu = false;
  int act_bits = 8;
  double act_hi = 1;  // activations quantized over [0, act_hi]
};

struct QuantizedModel {
  std::vector<QuantizedLayer> layers;
  Backend backend;

  double MeanAdditionFactor() const;
  std::int64_t MaxAbsQ() const;
};

// QuantMul: symmetric RUQ weights. PannAdd: PANN weights at backend.r.
QuantizedModel QuantizeModel(const Model& model, const Calibration& calib,
                             const Backend& backend);

// Toggle accounting for the repeated-addition engine. Each neuron owns a
// positive and a negative accumulation path; an element goes to the path of
// its weight sign and is added |q| times.
class PannToggleMeter {
 public:
  PannToggleMeter(int bx_tilde, int acc_width);

  void BeginNeuron();
  void Element(std::int64_t q_w, std::int64_t q_x);
  // Checks both registers against the integer sums of the engine.
  void EndNeuron(std::int64_t sum_plus, std::int64_t sum_minus);

  const ToggleTally& tally() const { return tally_; }
  std::uint64_t elements() const { return elements_; }
  ToggleReport Report() const;

 private:
  int bx_tilde_;
  Accumulator plus_;
  Accumulator minus_;
  ToggleTally tally_;
  std::uint64_t elements_ = 0;
};

std::vector<double> ForwardFloat(const Model& model, std::span<const double> x);
// Integer dot products, rescaled by gamma_w * gamma_x.
std::vector<double> ForwardMultiply(const QuantizedModel& qm,
                                    std::span<const double> x);
// Same tensors, products realized by repeated additions on sign-split paths.
std::vector<double> ForwardRepeatedAdd(const QuantizedModel& qm,
                                       std::span<const double> x,
                                       PannToggleMeter* meter = nullptr);

class InferenceEngine {
 public:
  // `calib` may be null for FloatRef.
  InferenceEngine(const Model& model, const Backend& backend,
                  const Calibration* calib);

  std::vector<double> Forward(std::span<const double> x,
                              PannToggleMeter* meter = nullptr) const;
  const QuantizedModel& quantized() const { return qm_; }
  const Backend& backend() const { return backend_; }

 private:
  const Model& model_;
  Backend backend_;
  QuantizedModel qm_;
};

struct EvalReport {
  double accuracy = 0;
  std::size_t samples = 0;
  std::optional<double> measured_power;
  std::optional<double> predicted_power;
  double addition_factor = 0;  // achieved mean |q| per weight (PannAdd)
  std::int64_t max_abs_q = 0;
  ToggleReport toggles;
  Backend backend;
};

EvalReport Evaluate(const Model& model, const Dataset& data,
                    const Backend& backend, const Calibration& calib);

std::size_t ArgMax(std::span<const double> v);

struct BudgetRow {
  int bx_tilde = 0;
  double r = 0;
  double accuracy = 0;
  double addition_factor = 0;
  std::int64_t max_abs_q = 0;
  double predicted_power = 0;
  double measured_power = 0;
};

struct BudgetSearchResult {
  double budget = 0;
  std::vector<BudgetRow> rows;
  std::vector<int> omitted;
  std::size_t best = 0;

  const BudgetRow& chosen() const { return rows[best]; }
};

// Sweeps every feasible width, evaluates on `data`, keeps the most accurate
// configuration (ties go to the narrower width).
BudgetSearchResult BudgetSearch(const Model& model, const Dataset& data,
                                const Calibration& calib, double budget_p,
                                IntRange range,
                                QuantScope scope = QuantScope::kPerNeuron);

struct TradeoffRow {
  int bx_tilde = 0;
  double latency = 0;
  int b_r = 1;
  double act_mem = 0;
  double weight_mem = 0;
  double accuracy = 0;
};

std::vector<TradeoffRow> TradeoffTable(const Model& model, const Dataset& data,
                                       const Calibration& calib,
                                       double budget_p, int b_x_baseline,
                                       IntRange range = {2, 8},
                                       QuantScope scope =
                                           QuantScope::kPerNeuron);

}  // namespace pann

#endif  // PANN_INFER_H_
