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

#ifndef PANN_MSE_H_
#define PANN_MSE_H_

#include <cstdint>
#include <vector>

#include "pann/power_model.h"

namespace pann {

// Moments of a single dot product w.x with quantization errors e_w, e_x.
struct MseParams {
  double d = 1;
  double m_x = 1;  // activations on [0, m_x]
  double m_w = 1;  // weights on [-m_w/2, m_w/2]
  double sigma_w2 = 0;
  double sigma_x2 = 0;
  double sigma_ew2 = 0;
  double sigma_ex2 = 0;

  // Second moments of the uniform model; error moments left at zero.
  static MseParams Uniform(double d, double m_x, double m_w);
};

double MseGeneral(const MseParams& p, bool include_second_order);

// d m_x^2 m_w^2 / 144, shared by every closed form below.
double MsePrefactor(double d, double m_x, double m_w);

double MseRuq(double d, double m_x, double m_w, int b_x, int b_w);

// Equal-power form: R = P / bx - 0.5. Throws InfeasibleBudget if 2P <= bx.
double MsePann(double d, double m_x, double m_w, int bx_tilde, double budget_p);

// Fixed addition factor: weight term 1 / (4 R^2).
double MsePannFixedR(double d, double m_x, double m_w, int bx_tilde, double r);

// Second moment of the PANN weight error for uniform weights.
// Large-d approximation m_w^2 / (192 R^2).
double PannWeightErrorMoment(double m_w, double r);
// Same, keeping the finite-d variance of ||w||_1.
double PannWeightErrorMomentExact(double d, double m_w, double r);

struct OptimalBx {
  int bx_tilde = 0;
  double mse = 0;
};
// Smallest-MSE width; ties go to the narrower width. Infeasible widths are
// skipped; throws InfeasibleBudget if none remain.
OptimalBx OptimalBxTilde(double d, double m_x, double m_w, double budget_p,
                         IntRange candidates);

struct RatioPoint {
  int b = 0;
  double budget = 0;
  int bx_tilde = 0;
  double mse_ruq = 0;
  double mse_pann = 0;
  double ratio = 0;
};

// Closed-form MSE_RUQ / MSE_PANN at the budget of a b-bit unsigned MAC.
std::vector<RatioPoint> RatioCurve(double d, double m_x, double m_w,
                                   const std::vector<int>& bits,
                                   IntRange candidates = {2, 8});

// First b whose ratio drops below 1, or one past the last b if none does.
int CrossingBit(const std::vector<RatioPoint>& curve);

struct DistributionModel {
  enum class Kind { kUniformRange, kGaussianReLU };
  Kind kind = Kind::kUniformRange;
  double m_x = 1;  // uniform model ranges
  double m_w = 1;
  double mean = 0;  // Gaussian model: x = relu(N(mean, std)), w = N(0, std)
  double std = 1;
};

struct QuantConfig {
  enum class Weights { kExact, kRuq, kPann };
  enum class Activations { kExact, kRuq };
  Weights weights = Weights::kRuq;
  Activations activations = Activations::kRuq;
  int b_w = 4;
  int b_x = 4;
  double r = 1;  // PANN addition factor
  // Clip ranges for the Gaussian model; 0 selects them by grid search.
  double act_clip = 0;
  double weight_clip = 0;
};

struct MonteCarloResult {
  double mse = 0;
  double std_error = 0;
  std::uint64_t trials = 0;
  double act_clip = 0;
  double weight_clip = 0;
};

// Mean of (w.x - w_hat.x_hat)^2 over sampled (w, x). Under the uniform model
// the RUQ is the midrise quantizer over the known range. Throws
// ContractViolation if trials < 1000.
MonteCarloResult MonteCarloMse(const DistributionModel& model, int d,
                               const QuantConfig& config,
                               std::uint64_t trials, std::uint64_t seed);

// Empirical second moment of w - gamma q for uniform weights.
double EmpiricalPannWeightError(int d, double m_w, double r,
                                std::uint64_t trials, std::uint64_t seed);

// Ratio curve measured by Monte Carlo. For each b the PANN side takes the
// best width in `candidates` at the b-bit unsigned MAC budget.
std::vector<RatioPoint> MonteCarloRatioCurve(const DistributionModel& model,
                                             int d,
                                             const std::vector<int>& bits,
                                             IntRange candidates,
                                             std::uint64_t trials,
                                             std::uint64_t seed);

// Clip value in (0, peak] minimizing the empirical element MSE of a clipped
// quantizer on `samples`.
double SearchActivationClip(const std::vector<double>& samples, int bits);
double SearchWeightClip(const std::vector<double>& samples, int bits);

}  // namespace pann

#endif  // PANN_MSE_H_
