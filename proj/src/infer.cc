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

#include "pann/infer.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "pann/errors.h"
#include "pann/rng.h"

namespace pann {

std::size_t Model::input_dim() const {
  return layers.empty() ? 0 : layers.front().inputs();
}

std::size_t Model::output_dim() const {
  return layers.empty() ? 0 : layers.back().outputs();
}

void Model::Validate() const {
  if (layers.empty()) throw ValidationError("model has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    try {
      layers[l].Validate();
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("layers[{}]: {}", l, e.what()));
    }
    if (l > 0 && layers[l].inputs() != layers[l - 1].outputs()) {
      throw ValidationError(fmt::format(
          "layers[{}] expects {} inputs but layers[{}] produces {}", l,
          layers[l].inputs(), l - 1, layers[l - 1].outputs()));
    }
    const bool last = l + 1 == layers.size();
    if (layers[l].relu == last) {
      throw ValidationError(fmt::format(
          "layers[{}] must be {}", l,
          last ? "linear (logits)" : "followed by a ReLU"));
    }
  }
}

void Dataset::ValidateFor(const Model& model) const {
  if (labels.empty()) throw ValidationError("dataset is empty");
  if (samples.rows != labels.size()) {
    throw ValidationError("sample and label counts differ");
  }
  if (samples.cols != model.input_dim()) {
    throw ValidationError(fmt::format(
        "samples have {} features, model expects {}", samples.cols,
        model.input_dim()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 ||
        static_cast<std::size_t>(labels[i]) >= model.output_dim()) {
      throw ValidationError(fmt::format(
          "sample {} has label {}, model has {} classes", i, labels[i],
          model.output_dim()));
    }
  }
}

Backend Backend::FloatRef() { return {}; }

Backend Backend::QuantMul(int b_x, int b_w) {
  Backend b;
  b.kind = BackendKind::kQuantMul;
  b.b_x = b_x;
  b.b_w = b_w;
  return b;
}

Backend Backend::PannAdd(int bx_tilde, double r, bool count_toggles) {
  Backend b;
  b.kind = BackendKind::kPannAdd;
  b.bx_tilde = bx_tilde;
  b.r = r;
  b.count_toggles = count_toggles;
  return b;
}

std::string Backend::Describe() const {
  const char* scope_name =
      scope == QuantScope::kPerNeuron ? "per-neuron" : "per-layer";
  switch (kind) {
    case BackendKind::kFloatRef:
      return "float-ref";
    case BackendKind::kQuantMul:
      return fmt::format("quant-mul(b_x={}, b_w={}, {})", b_x, b_w, scope_name);
    case BackendKind::kPannAdd:
      return fmt::format("pann-add(bx={}, R={:.6g}, {})", bx_tilde, r,
                         scope_name);
  }
  return "unknown";
}

Calibration Calibrate(const Model& model, const Dataset& calib,
                      const CalibrationOptions& options) {
  calib.ValidateFor(model);
  std::vector<std::size_t> order(calib.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t count = order.size();
  if (options.max_samples > 0 && options.max_samples < order.size()) {
    Rng rng = MakeRng(options.seed, 0);
    // Partial Fisher-Yates with an explicit draw so the subset does not
    // depend on the standard library's shuffle.
    for (std::size_t i = 0; i < options.max_samples; ++i) {
      const std::size_t j = i + rng() % (order.size() - i);
      std::swap(order[i], order[j]);
    }
    count = options.max_samples;
  }
  Calibration c;
  c.input_max.assign(model.layers.size(), 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> x(calib.samples.row(order[s]).begin(),
                          calib.samples.row(order[s]).end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      for (double v : x) c.input_max[l] = std::max(c.input_max[l], v);
      x = model.layers[l].Apply(x);
    }
  }
  return c;
}

double QuantizedModel::MeanAdditionFactor() const {
  double l1 = 0;
  double n = 0;
  for (const QuantizedLayer& layer : layers) {
    for (const QuantizedTensor& row : layer.rows) {
      for (std::int64_t q : row.q) l1 += std::abs(q);
      n += row.q.size();
    }
  }
  return n == 0 ? 0 : l1 / n;
}

std::int64_t QuantizedModel::MaxAbsQ() const {
  std::int64_t m = 0;
  for (const QuantizedLayer& layer : layers) {
    for (const QuantizedTensor& row : layer.rows) m = std::max(m, row.MaxAbs());
  }
  return m;
}

QuantizedModel QuantizeModel(const Model& model, const Calibration& calib,
                             const Backend& backend) {
  if (backend.kind == BackendKind::kFloatRef) {
    throw ContractViolation("the float backend has nothing to quantize");
  }
  if (calib.input_max.size() != model.layers.size()) {
    throw ContractViolation("calibration does not match the model");
  }
  QuantizedModel qm;
  qm.backend = backend;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const DenseLayer& layer = model.layers[l];
    QuantizedLayer ql;
    ql.bias = layer.bias;
    ql.relu = layer.relu;
    ql.act_hi = calib.input_max[l] > 0 ? calib.input_max[l] : 1.0;
    if (backend.kind == BackendKind::kPannAdd) {
      ql.act_bits = backend.bx_tilde;
      ql.rows = PannQuantizeRows(layer.weights, backend.r, backend.scope);
    } else {
      ql.act_bits = backend.b_x;
      double layer_max = 0;
      for (double w : layer.weights.data) layer_max = std::max(layer_max, std::abs(w));
      for (std::size_t o = 0; o < layer.outputs(); ++o) {
        double m = layer_max;
        if (backend.scope == QuantScope::kPerNeuron) {
          m = 0;
          for (double w : layer.weights.row(o)) m = std::max(m, std::abs(w));
        }
        if (m == 0) {
          QuantizedTensor zero;
          zero.q.assign(layer.inputs(), 0);
          zero.shape = {layer.inputs()};
          zero.is_signed = true;
          ql.rows.push_back(zero);
        } else {
          ql.rows.push_back(RuqQuantizeSymmetric(layer.weights.row(o), backend.b_w, m));
        }
      }
    }
    qm.layers.push_back(std::move(ql));
  }
  return qm;
}

PannToggleMeter::PannToggleMeter(int bx_tilde, int acc_width)
    : bx_tilde_(bx_tilde), plus_(acc_width, false), minus_(acc_width, false) {}

void PannToggleMeter::BeginNeuron() {
  tally_ += plus_.Clear();
  tally_ += minus_.Clear();
}

void PannToggleMeter::Element(std::int64_t q_w, std::int64_t q_x) {
  Accumulator& path = q_w < 0 ? minus_ : plus_;
  tally_ += path.Drive(EncodeWord(q_x, bx_tilde_, false));
  for (std::int64_t j = std::abs(q_w); j > 0; --j) tally_ += path.Add();
  ++elements_;
}

void PannToggleMeter::EndNeuron(std::int64_t sum_plus, std::int64_t sum_minus) {
  const std::uint64_t mask = WidthMask(plus_.width());
  if (plus_.value().bits != (static_cast<std::uint64_t>(sum_plus) & mask) ||
      minus_.value().bits != (static_cast<std::uint64_t>(sum_minus) & mask)) {
    throw std::logic_error("accumulator registers diverged from the engine");
  }
}

ToggleReport PannToggleMeter::Report() const {
  return ToggleReport::FromTally(tally_, elements_);
}

std::vector<double> ForwardFloat(const Model& model, std::span<const double> x) {
  std::vector<double> h(x.begin(), x.end());
  for (const DenseLayer& layer : model.layers) h = layer.Apply(h);
  return h;
}

namespace {

QuantizedTensor QuantizeInput(const QuantizedLayer& layer,
                              std::span<const double> x, std::size_t index) {
  for (double v : x) {
    if (v < 0) {
      throw ContractViolation(fmt::format(
          "negative activation {} entering fixed-point layer {}; a ReLU is "
          "missing",
          v, index));
    }
  }
  return RuqQuantize(x, layer.act_bits, 0.0, layer.act_hi);
}

double Rescale(const QuantizedTensor& w, const QuantizedTensor& x,
               std::int64_t acc, double bias) {
  return (w.gamma * x.gamma) * static_cast<double>(acc) + bias;
}

template <typename RowFn>
std::vector<double> RunQuantized(const QuantizedModel& qm,
                                 std::span<const double> x, RowFn&& row_fn) {
  std::vector<double> h(x.begin(), x.end());
  for (std::size_t l = 0; l < qm.layers.size(); ++l) {
    const QuantizedLayer& layer = qm.layers[l];
    const QuantizedTensor qx = QuantizeInput(layer, h, l);
    std::vector<double> y(layer.rows.size());
    for (std::size_t o = 0; o < layer.rows.size(); ++o) {
      const QuantizedTensor& qw = layer.rows[o];
      if (qw.q.size() != qx.q.size()) {
        throw ContractViolation("quantized layer width mismatch");
      }
      y[o] = Rescale(qw, qx, row_fn(qw.q, qx.q), layer.bias[o]);
      if (layer.relu) y[o] = std::max(y[o], 0.0);
    }
    h = std::move(y);
  }
  return h;
}

}  // namespace

std::vector<double> ForwardMultiply(const QuantizedModel& qm,
                                    std::span<const double> x) {
  return RunQuantized(qm, x, [](const std::vector<std::int64_t>& w,
                                const std::vector<std::int64_t>& a) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[i];
    return acc;
  });
}

std::vector<double> ForwardRepeatedAdd(const QuantizedModel& qm,
                                       std::span<const double> x,
                                       PannToggleMeter* meter) {
  return RunQuantized(qm, x, [meter](const std::vector<std::int64_t>& w,
                                     const std::vector<std::int64_t>& a) {
    if (meter) meter->BeginNeuron();
    std::int64_t plus = 0;
    std::int64_t minus = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] >= 0) {
        plus += MulViaAdditions(w[i], a[i]);
      } else {
        minus += MulViaAdditions(-w[i], a[i]);
      }
      if (meter) meter->Element(w[i], a[i]);
    }
    if (meter) meter->EndNeuron(plus, minus);
    return plus - minus;
  });
}

InferenceEngine::InferenceEngine(const Model& model, const Backend& backend,
                                 const Calibration* calib)
    : model_(model), backend_(backend) {
  if (backend.kind != BackendKind::kFloatRef) {
    if (!calib) throw ContractViolation("fixed-point backends need calibration");
    qm_ = QuantizeModel(model, *calib, backend);
  }
}

std::vector<double> InferenceEngine::Forward(std::span<const double> x,
                                             PannToggleMeter* meter) const {
  switch (backend_.kind) {
    case BackendKind::kFloatRef:
      return ForwardFloat(model_, x);
    case BackendKind::kQuantMul:
      return ForwardMultiply(qm_, x);
    case BackendKind::kPannAdd:
      return ForwardRepeatedAdd(qm_, x, meter);
  }
  throw std::logic_error("unknown backend");
}

std::size_t ArgMax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) -
                                  v.begin());
}

EvalReport Evaluate(const Model& model, const Dataset& data,
                    const Backend& backend, const Calibration& calib) {
  data.ValidateFor(model);
  const InferenceEngine engine(model, backend, &calib);
  std::optional<PannToggleMeter> meter;
  if (backend.kind == BackendKind::kPannAdd && backend.count_toggles) {
    meter.emplace(backend.bx_tilde, backend.acc_width);
  }
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const std::vector<double> logits =
        engine.Forward(data.samples.row(s), meter ? &*meter : nullptr);
    if (ArgMax(logits) == static_cast<std::size_t>(data.labels[s])) ++correct;
  }
  EvalReport rep;
  rep.backend = backend;
  rep.samples = data.size();
  rep.accuracy = static_cast<double>(correct) / data.size();
  if (backend.kind == BackendKind::kPannAdd) {
    rep.predicted_power = PannPower(backend.r, backend.bx_tilde);
    rep.addition_factor = engine.quantized().MeanAdditionFactor();
    rep.max_abs_q = engine.quantized().MaxAbsQ();
  } else if (backend.kind == BackendKind::kQuantMul) {
    rep.predicted_power =
        MacPower(backend.b_w, backend.b_x, backend.acc_width, true).total;
    rep.max_abs_q = engine.quantized().MaxAbsQ();
  }
  if (meter) {
    rep.toggles = meter->Report();
    rep.measured_power = rep.toggles.total;
  }
  return rep;
}

BudgetSearchResult BudgetSearch(const Model& model, const Dataset& data,
                                const Calibration& calib, double budget_p,
                                IntRange range, QuantScope scope) {
  const EqualPowerResult points = EqualPowerPoints({budget_p}, range);
  BudgetSearchResult res;
  res.budget = budget_p;
  res.omitted = points.omitted;
  for (const EqualPowerPoint& pt : points.points) {
    Backend backend = Backend::PannAdd(pt.bx_tilde, pt.r, true);
    backend.scope = scope;
    const EvalReport rep = Evaluate(model, data, backend, calib);
    BudgetRow row;
    row.bx_tilde = pt.bx_tilde;
    row.r = pt.r;
    row.accuracy = rep.accuracy;
    row.addition_factor = rep.addition_factor;
    row.max_abs_q = rep.max_abs_q;
    row.predicted_power = *rep.predicted_power;
    row.measured_power = rep.measured_power.value_or(0);
    res.rows.push_back(row);
    if (res.rows.size() > 1 && row.accuracy > res.rows[res.best].accuracy) {
      res.best = res.rows.size() - 1;
    }
  }
  return res;
}

std::vector<TradeoffRow> TradeoffTable(const Model& model, const Dataset& data,
                                       const Calibration& calib,
                                       double budget_p, int b_x_baseline,
                                       IntRange range, QuantScope scope) {
  const BudgetSearchResult search =
      BudgetSearch(model, data, calib, budget_p, range, scope);
  std::vector<TradeoffRow> rows;
  for (const BudgetRow& b : search.rows) {
    const StorageReport s =
        MakeStorageReport(b.max_abs_q, b_x_baseline, b.bx_tilde, b.r);
    rows.push_back({b.bx_tilde, s.latency_factor, s.b_r,
                    s.activation_mem_factor, s.weight_mem_factor, b.accuracy});
  }
  return rows;
}

}  // namespace pann
