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

#include "pann/mse.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "pann/errors.h"
#include "pann/quantize.h"
#include "pann/rng.h"

namespace pann {
namespace {

constexpr std::uint64_t kShardTrials = 256;
constexpr std::uint64_t kClipStream = 7;
constexpr std::uint64_t kShardStreamBase = 1000;
constexpr int kClipSamples = 1 << 15;
constexpr int kClipGrid = 96;

double Levels(int bits) { return std::ldexp(1.0, bits); }

// Reconstruction at the centre of the cell, 2^bits cells over [lo, hi].
double Midrise(double v, double lo, double hi, int bits) {
  const double n = Levels(bits);
  const double step = (hi - lo) / n;
  const double k = std::clamp(std::floor((v - lo) / step), 0.0, n - 1);
  return lo + (k + 0.5) * step;
}

// Zero is a level; 2^bits levels spanning [0, clip].
double MidtreadUnsigned(double v, double clip, int bits) {
  const double top = Levels(bits) - 1;
  const double step = clip / top;
  return std::clamp(std::round(v / step), 0.0, top) * step;
}

struct Sampler {
  const DistributionModel& model;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  std::normal_distribution<double> normal{0.0, 1.0};

  double Activation(Rng& rng) {
    if (model.kind == DistributionModel::Kind::kUniformRange) {
      return unit(rng) * model.m_x;
    }
    return std::max(0.0, model.mean + model.std * normal(rng));
  }
  double Weight(Rng& rng) {
    if (model.kind == DistributionModel::Kind::kUniformRange) {
      return (unit(rng) - 0.5) * model.m_w;
    }
    return model.std * normal(rng);
  }
};

template <typename Quantizer>
double ClipSearch(const std::vector<double>& samples, double peak,
                  Quantizer&& quantize) {
  double best_clip = peak;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= kClipGrid; ++j) {
    const double clip = peak * j / kClipGrid;
    double err = 0;
    for (double v : samples) {
      const double e = v - quantize(v, clip);
      err += e * e;
    }
    if (err < best) {
      best = err;
      best_clip = clip;
    }
  }
  return best_clip;
}

}  // namespace

MseParams MseParams::Uniform(double d, double m_x, double m_w) {
  MseParams p;
  p.d = d;
  p.m_x = m_x;
  p.m_w = m_w;
  p.sigma_x2 = m_x * m_x / 3.0;
  p.sigma_w2 = m_w * m_w / 12.0;
  return p;
}

double MseGeneral(const MseParams& p, bool include_second_order) {
  double inner = p.sigma_w2 * p.sigma_ex2 + p.sigma_x2 * p.sigma_ew2;
  if (include_second_order) inner += p.sigma_ex2 * p.sigma_ew2;
  return p.d * inner;
}

double MsePrefactor(double d, double m_x, double m_w) {
  return d * m_x * m_x * m_w * m_w / 144.0;
}

double MseRuq(double d, double m_x, double m_w, int b_x, int b_w) {
  if (b_x < 1 || b_w < 1) throw ContractViolation("RUQ bits must be >= 1");
  return MsePrefactor(d, m_x, m_w) *
         (std::ldexp(1.0, -2 * b_x) + 4.0 * std::ldexp(1.0, -2 * b_w));
}

double MsePann(double d, double m_x, double m_w, int bx_tilde,
               double budget_p) {
  if (bx_tilde < 1) throw ContractViolation("activation bits must be >= 1");
  const double denom = 2.0 * budget_p - bx_tilde;
  if (!(denom > 0)) {
    throw InfeasibleBudget(fmt::format(
        "P={} leaves no additions at {} activation bits; need P > {}",
        budget_p, bx_tilde, 0.5 * bx_tilde));
  }
  const double b = bx_tilde;
  return MsePrefactor(d, m_x, m_w) *
         (std::ldexp(1.0, -2 * bx_tilde) + b * b / (denom * denom));
}

double MsePannFixedR(double d, double m_x, double m_w, int bx_tilde,
                     double r) {
  if (!(r > 0)) throw ContractViolation("addition factor must be > 0");
  return MsePrefactor(d, m_x, m_w) *
         (std::ldexp(1.0, -2 * bx_tilde) + 1.0 / (4.0 * r * r));
}

double PannWeightErrorMoment(double m_w, double r) {
  return m_w * m_w / (192.0 * r * r);
}

double PannWeightErrorMomentExact(double d, double m_w, double r) {
  return PannWeightErrorMoment(m_w, r) * (1.0 + 1.0 / (3.0 * d));
}

OptimalBx OptimalBxTilde(double d, double m_x, double m_w, double budget_p,
                         IntRange candidates) {
  OptimalBx best;
  bool found = false;
  for (int b : candidates.values()) {
    if (b < 1 || 2.0 * budget_p <= b) continue;
    const double mse = MsePann(d, m_x, m_w, b, budget_p);
    if (!found || mse < best.mse) {
      best = {b, mse};
      found = true;
    }
  }
  if (!found) {
    throw InfeasibleBudget(fmt::format(
        "P={} is infeasible for every width in {}; need P > {}", budget_p,
        candidates.ToString(), 0.5 * std::max(candidates.lo, 1)));
  }
  return best;
}

std::vector<RatioPoint> RatioCurve(double d, double m_x, double m_w,
                                   const std::vector<int>& bits,
                                   IntRange candidates) {
  std::vector<RatioPoint> out;
  for (int b : bits) {
    RatioPoint pt;
    pt.b = b;
    pt.budget = UnsignedMacBudget(b).p;
    const OptimalBx opt = OptimalBxTilde(d, m_x, m_w, pt.budget, candidates);
    pt.bx_tilde = opt.bx_tilde;
    pt.mse_pann = opt.mse;
    pt.mse_ruq = MseRuq(d, m_x, m_w, b, b);
    pt.ratio = pt.mse_ruq / pt.mse_pann;
    out.push_back(pt);
  }
  return out;
}

int CrossingBit(const std::vector<RatioPoint>& curve) {
  for (const RatioPoint& p : curve) {
    if (p.ratio < 1.0) return p.b;
  }
  return curve.empty() ? 0 : curve.back().b + 1;
}

double SearchActivationClip(const std::vector<double>& samples, int bits) {
  double peak = 0;
  for (double v : samples) peak = std::max(peak, v);
  if (peak == 0) return 1.0;
  return ClipSearch(samples, peak, [bits](double v, double clip) {
    return MidtreadUnsigned(v, clip, bits);
  });
}

double SearchWeightClip(const std::vector<double>& samples, int bits) {
  double peak = 0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  if (peak == 0) return 1.0;
  return ClipSearch(samples, peak, [bits](double v, double clip) {
    return Midrise(v, -clip, clip, bits);
  });
}

MonteCarloResult MonteCarloMse(const DistributionModel& model, int d,
                               const QuantConfig& config,
                               std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1000) {
    throw ContractViolation(fmt::format(
        "Monte-Carlo MSE needs at least 1000 trials, got {}", trials));
  }
  if (d < 1) throw ContractViolation("dot-product length must be >= 1");
  const bool gaussian = model.kind == DistributionModel::Kind::kGaussianReLU;

  MonteCarloResult res;
  res.trials = trials;
  res.act_clip = config.act_clip;
  res.weight_clip = config.weight_clip;
  if (gaussian && (res.act_clip == 0 || res.weight_clip == 0)) {
    Rng rng = MakeRng(seed, kClipStream);
    Sampler s{model};
    std::vector<double> xs(kClipSamples);
    std::vector<double> ws(kClipSamples);
    for (int i = 0; i < kClipSamples; ++i) {
      xs[i] = s.Activation(rng);
      ws[i] = s.Weight(rng);
    }
    if (res.act_clip == 0) res.act_clip = SearchActivationClip(xs, config.b_x);
    if (res.weight_clip == 0) {
      res.weight_clip = SearchWeightClip(ws, config.b_w);
    }
  }

  std::vector<double> w(d);
  std::vector<double> x(d);
  std::vector<double> w_hat(d);
  double sum = 0;
  double sum_sq = 0;
  const std::uint64_t shards = (trials + kShardTrials - 1) / kShardTrials;
  for (std::uint64_t shard = 0; shard < shards; ++shard) {
    Rng rng = MakeRng(seed, kShardStreamBase + shard);
    Sampler s{model};
    const std::uint64_t begin = shard * kShardTrials;
    const std::uint64_t end = std::min(trials, begin + kShardTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      for (int i = 0; i < d; ++i) {
        w[i] = s.Weight(rng);
        x[i] = s.Activation(rng);
      }
      switch (config.weights) {
        case QuantConfig::Weights::kExact:
          w_hat = w;
          break;
        case QuantConfig::Weights::kRuq:
          for (int i = 0; i < d; ++i) {
            w_hat[i] = gaussian ? Midrise(w[i], -res.weight_clip,
                                          res.weight_clip, config.b_w)
                                : Midrise(w[i], -0.5 * model.m_w,
                                          0.5 * model.m_w, config.b_w);
          }
          break;
        case QuantConfig::Weights::kPann:
          w_hat = PannQuantizeWeights(w, config.r).Dequantized();
          break;
      }
      double exact = 0;
      double approx = 0;
      for (int i = 0; i < d; ++i) {
        double x_hat = x[i];
        if (config.activations == QuantConfig::Activations::kRuq) {
          x_hat = gaussian ? MidtreadUnsigned(x[i], res.act_clip, config.b_x)
                           : Midrise(x[i], 0.0, model.m_x, config.b_x);
        }
        exact += w[i] * x[i];
        approx += w_hat[i] * x_hat;
      }
      const double e2 = (exact - approx) * (exact - approx);
      sum += e2;
      sum_sq += e2 * e2;
    }
  }
  const double n = static_cast<double>(trials);
  res.mse = sum / n;
  res.std_error = std::sqrt(std::max(0.0, sum_sq / n - res.mse * res.mse) / n);
  return res;
}

double EmpiricalPannWeightError(int d, double m_w, double r,
                                std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1 || d < 1) throw ContractViolation("need trials, d >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(d);
  double total = 0;
  const std::uint64_t shards = (trials + kShardTrials - 1) / kShardTrials;
  for (std::uint64_t shard = 0; shard < shards; ++shard) {
    Rng rng = MakeRng(seed, kShardStreamBase + shard);
    const std::uint64_t end = std::min(trials, (shard + 1) * kShardTrials);
    for (std::uint64_t t = shard * kShardTrials; t < end; ++t) {
      for (double& v : w) v = (unit(rng) - 0.5) * m_w;
      const QuantizedTensor q = PannQuantizeWeights(w, r);
      double err = 0;
      for (int i = 0; i < d; ++i) {
        const double e = w[i] - q.Dequantize(i);
        err += e * e;
      }
      total += err / d;
    }
  }
  return total / static_cast<double>(trials);
}

std::vector<RatioPoint> MonteCarloRatioCurve(const DistributionModel& model,
                                             int d,
                                             const std::vector<int>& bits,
                                             IntRange candidates,
                                             std::uint64_t trials,
                                             std::uint64_t seed) {
  std::vector<RatioPoint> out;
  for (int b : bits) {
    RatioPoint pt;
    pt.b = b;
    pt.budget = UnsignedMacBudget(b).p;
    QuantConfig ruq;
    ruq.b_w = b;
    ruq.b_x = b;
    pt.mse_ruq = MonteCarloMse(model, d, ruq, trials, seed).mse;
    bool found = false;
    for (int bt : candidates.values()) {
      const double r = pt.budget / bt - 0.5;
      if (!(r > 0)) continue;
      QuantConfig pann;
      pann.weights = QuantConfig::Weights::kPann;
      pann.r = r;
      pann.b_x = bt;
      pann.b_w = bt;
      const double mse = MonteCarloMse(model, d, pann, trials, seed).mse;
      if (!found || mse < pt.mse_pann) {
        pt.mse_pann = mse;
        pt.bx_tilde = bt;
        found = true;
      }
    }
    if (!found) {
      throw InfeasibleBudget(fmt::format("no feasible width for b={}", b));
    }
    pt.ratio = pt.mse_ruq / pt.mse_pann;
    out.push_back(pt);
  }
  return out;
}

}  // namespace pann
