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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pann/errors.h"
#include "pann/mse.h"

using namespace pann;

namespace {

double Bracket(double mse, double d, double mx, double mw) { return mse / MsePrefactor(d, mx, mw); }

}  // namespace

TEST_CASE("general MSE") {
  MseParams p = MseParams::Uniform(1024, 1, 1);
  CHECK(p.sigma_x2 == doctest::Approx(1.0 / 3));
  CHECK(p.sigma_w2 == doctest::Approx(1.0 / 12));
  CHECK(MseGeneral(p, true) == 0);
  p.sigma_ex2 = p.sigma_ew2 = 1e-4;
  CHECK(MseGeneral(p, false) == doctest::Approx(1024 * (1.0 / 12 + 1.0 / 3) * 1e-4));
  CHECK(MseGeneral(p, false) == doctest::Approx(0.0427).epsilon(0.001));
  CHECK(MseGeneral(p, true) >= MseGeneral(p, false));
}

TEST_CASE("the second-order term never lowers the prediction") {
  for (double ex : {0.0, 1e-6, 1e-3, 0.1}) {
    for (double ew : {0.0, 1e-5, 1e-2, 0.3}) {
      MseParams p = MseParams::Uniform(64, 2, 0.5);
      p.sigma_ex2 = ex;
      p.sigma_ew2 = ew;
      CHECK(MseGeneral(p, true) >= MseGeneral(p, false));
    }
  }
}

TEST_CASE("RUQ closed form") {
  CHECK(MseRuq(1, 1, 1, 2, 2) == doctest::Approx(5.0 / 2304));
  CHECK(MseRuq(1, 1, 1, 30, 30) < 1e-18);
  CHECK(MseRuq(10, 1, 2, 3, 4) == doctest::Approx(4 * MseRuq(10, 1, 1, 3, 4)));
  // The closed form is the general MSE with uniform quantization errors.
  MseParams p = MseParams::Uniform(256, 1.5, 0.7);
  const int bx = 3, bw = 5;
  p.sigma_ex2 = std::pow(1.5 / std::ldexp(1.0, bx), 2) / 12;
  p.sigma_ew2 = std::pow(0.7 / std::ldexp(1.0, bw), 2) / 12;
  CHECK(MseGeneral(p, false) == doctest::Approx(MseRuq(256, 1.5, 0.7, bx, bw)));
}

TEST_CASE("PANN closed form") {
  CHECK(Bracket(MsePann(1, 1, 1, 3, 10), 1, 1, 1) == doctest::Approx(1.0 / 64 + 9.0 / 289));
  CHECK(Bracket(MsePann(1, 1, 1, 3, 10), 1, 1, 1) == doctest::Approx(0.04677).epsilon(1e-3));
  CHECK(Bracket(MsePann(1, 1, 1, 4, 10), 1, 1, 1) == doctest::Approx(0.06641).epsilon(1e-3));
  CHECK(Bracket(MsePannFixedR(1, 1, 1, 5, 1e9), 1, 1, 1) == doctest::Approx(std::ldexp(1.0, -10)));
  // Equal-power form is the fixed-R form at R = P / bx - 0.5.
  CHECK(MsePann(7, 2, 3, 5, 16.5) == doctest::Approx(MsePannFixedR(7, 2, 3, 5, 16.5 / 5 - 0.5)));
  CHECK_THROWS_AS(MsePann(1, 1, 1, 4, 2), InfeasibleBudget);
}

TEST_CASE("PANN weight-error moment") {
  CHECK(PannWeightErrorMoment(1, 1) == doctest::Approx(1.0 / 192));
  CHECK(PannWeightErrorMomentExact(1024, 1, 2) ==
        doctest::Approx(PannWeightErrorMoment(1, 2) * (1 + 1.0 / 3072)));
  const double emp = EmpiricalPannWeightError(1024, 1.0, 2.0, 2000, 3);
  CHECK(std::abs(emp - PannWeightErrorMoment(1, 2)) <= 0.10 * PannWeightErrorMoment(1, 2));
  CHECK(std::abs(emp - PannWeightErrorMomentExact(1024, 1, 2)) <=
        0.10 * PannWeightErrorMomentExact(1024, 1, 2));
}

TEST_CASE("optimal activation width") {
  CHECK(OptimalBxTilde(1, 1, 1, 10, {2, 8}).bx_tilde == 3);
  CHECK(OptimalBxTilde(1, 1, 1, 10, {5, 5}).bx_tilde == 5);
  int prev = 0;
  for (double p = 6; p <= 80; p += 0.5) {
    const int b = OptimalBxTilde(1, 1, 1, p, {2, 8}).bx_tilde;
    CHECK(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(OptimalBxTilde(1, 1, 1, 0.5, {2, 8}), InfeasibleBudget);
  // Infeasible candidates are skipped, not fatal.
  CHECK(OptimalBxTilde(1, 1, 1, 2.5, {2, 8}).bx_tilde == 2);
}

TEST_CASE("ratio curve under the uniform model") {
  std::vector<int> bits{2, 3, 4, 5, 6, 7, 8};
  const auto curve = RatioCurve(1024, 1, 1, bits);
  REQUIRE(curve.size() == 7);
  CHECK(curve[0].ratio == doctest::Approx(0.3125 / (1.0 / 64 + 9.0 / 289)));
  CHECK(curve[0].ratio > 1);
  CHECK(curve[6].ratio < 1);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].ratio < curve[i - 1].ratio);
  const int cross = CrossingBit(curve);
  CHECK(cross > 4);
  CHECK(cross <= 8);
  // Independent of d and the ranges.
  const auto other = RatioCurve(3, 0.2, 7, bits);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(other[i].ratio == doctest::Approx(curve[i].ratio));
    CHECK(other[i].bx_tilde == curve[i].bx_tilde);
  }
}

TEST_CASE("Monte-Carlo validation of the closed forms") {
  DistributionModel uniform;
  SUBCASE("RUQ x RUQ") {
    QuantConfig c;
    c.b_w = c.b_x = 4;
    const MonteCarloResult r = MonteCarloMse(uniform, 1024, c, 4000, 1);
    CHECK(std::abs(r.mse - MseRuq(1024, 1, 1, 4, 4)) <= 0.10 * MseRuq(1024, 1, 1, 4, 4));
  }
  SUBCASE("PANN x RUQ") {
    QuantConfig c;
    c.weights = QuantConfig::Weights::kPann;
    c.r = 2;
    c.b_x = 6;
    const MonteCarloResult r = MonteCarloMse(uniform, 1024, c, 4000, 2);
    const double pred = MsePannFixedR(1024, 1, 1, 6, 2);
    CHECK(std::abs(r.mse - pred) <= 0.10 * pred);
  }
  SUBCASE("lossless") {
    QuantConfig c;
    c.weights = QuantConfig::Weights::kExact;
    c.activations = QuantConfig::Activations::kExact;
    CHECK(MonteCarloMse(uniform, 16, c, 1000, 1).mse == 0);
  }
  SUBCASE("deterministic per seed") {
    QuantConfig c;
    CHECK(MonteCarloMse(uniform, 64, c, 1000, 9).mse == MonteCarloMse(uniform, 64, c, 1000, 9).mse);
    CHECK(MonteCarloMse(uniform, 64, c, 1000, 9).mse != MonteCarloMse(uniform, 64, c, 1000, 10).mse);
  }
  SUBCASE("trial floor") {
    CHECK_THROWS_AS(MonteCarloMse(uniform, 64, QuantConfig{}, 999, 1), ContractViolation);
  }
}

// The cross term assumes errors with zero conditional mean. A test-local
// sampler adds independent uniform noise, which satisfies that assumption.
TEST_CASE("second-order term helps when errors are independent of the values") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  const int d = 256;
  const double sx = 0.5, sw = 0.5;  // 1-bit steps on unit ranges
  double sum = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    double e = 0;
    for (int i = 0; i < d; ++i) {
      const double w = u(rng) - 0.5, x = u(rng);
      const double ew = (u(rng) - 0.5) * sw, ex = (u(rng) - 0.5) * sx;
      e += w * x - (w - ew) * (x - ex);
    }
    sum += e * e;
  }
  const double emp = sum / trials;
  MseParams p = MseParams::Uniform(d, 1, 1);
  p.sigma_ex2 = sx * sx / 12;
  p.sigma_ew2 = sw * sw / 12;
  CHECK(std::abs(MseGeneral(p, true) - emp) < std::abs(MseGeneral(p, false) - emp));
  CHECK(std::abs(MseGeneral(p, true) - emp) <= 0.03 * emp);
}

// With deterministic rounding E[x e_x] = E[e_x^2], which flips the sign of
// the cross term: d (s_w s_ex + s_x s_ew - s_ex s_ew).
TEST_CASE("deterministic 1-bit quantizers follow the negative cross term") {
  DistributionModel uniform;
  QuantConfig c;
  c.b_w = c.b_x = 1;
  const double emp = MonteCarloMse(uniform, 256, c, 20000, 4).mse;
  MseParams p = MseParams::Uniform(256, 1, 1);
  p.sigma_ex2 = p.sigma_ew2 = 0.25 / 12;
  const double minus = 2 * MseGeneral(p, false) - MseGeneral(p, true);
  CHECK(std::abs(emp - minus) <= 0.03 * minus);
}

TEST_CASE("clip search") {
  std::vector<double> xs;
  for (int i = 0; i <= 100000; ++i) xs.push_back(i / 100000.0);
  xs.push_back(50.0);  // one outlier should not set the range
  const double c = SearchActivationClip(xs, 4);
  CHECK(c < 5.0);
  CHECK(c > 0.5);
  std::vector<double> ws{-1, -0.5, 0, 0.5, 1};
  CHECK(SearchWeightClip(ws, 8) > 0.9);
}
