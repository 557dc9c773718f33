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

#ifndef PANN_POWER_MODEL_H_
#define PANN_POWER_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

namespace pann {

// Inclusive integer range, written "lo..hi" on the command line.
struct IntRange {
  int lo = 2;
  int hi = 8;

  std::vector<int> values() const;
  std::string ToString() const;
  // Accepts "a..b" or a single integer. Throws ParseError.
  static IntRange Parse(const std::string& text);
};

struct MacParams {
  int b_w = 0;
  int b_x = 0;
  int acc_width = 32;
  bool is_signed = true;
};

// Expected bit flips per MAC, split per component. Units are flips per
// operation throughout; nothing here is in joules.
struct MacPowerBreakdown {
  double mult_input_a = 0;
  double mult_input_b = 0;
  double mult_internal = 0;
  double acc_input = 0;
  double acc_sum = 0;
  double ff = 0;
  double mult = 0;
  double acc = 0;
  double total = 0;
  MacParams params;
};

// Throws ContractViolation if a width is non-positive or B < b_w + b_x.
MacPowerBreakdown MacPower(int b_w, int b_x, int acc_width, bool is_signed);

// Expected flips per element of the repeated-addition scheme: the input bus
// changes once, then every one of the r additions moves the sum and the FF.
double PannPower(double r, int bx_tilde);

struct PannPowerBreakdown {
  double acc_input = 0;
  double acc_sum = 0;
  double ff = 0;
  double total = 0;
};
PannPowerBreakdown PannPowerComponents(double r, int bx_tilde);

struct PowerBudget {
  double p = 0;  // flips per MAC-equivalent element
  double NetworkTotal(double mac_count) const { return p * mac_count; }
};

// Budget of a b-bit unsigned MAC, 0.5 b^2 + 4 b. Independent of B.
PowerBudget UnsignedMacBudget(int b);

struct EqualPowerPoint {
  int bx_tilde = 0;
  double r = 0;
};

struct EqualPowerResult {
  std::vector<EqualPowerPoint> points;
  std::vector<int> omitted;  // widths whose R would be <= 0
};

// r = P / bx - 0.5 for every bx in range. Throws InfeasibleBudget naming the
// minimum feasible P when no width survives.
EqualPowerResult EqualPowerPoints(PowerBudget budget, IntRange range);

double UnsignedPowerSave(int b, int acc_width);

int RequiredAccWidth(int b_x, int b_w, int kernel, int c_in);

double NetworkPower(double per_mac, double mac_count);

}  // namespace pann

#endif  // PANN_POWER_MODEL_H_
