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

#include "pann/power_model.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>

#include <fmt/format.h>

#include "pann/errors.h"

namespace pann {
namespace {

int ParseInt(std::string_view s, const std::string& whole) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("bad integer range '{}'", whole));
  }
  return v;
}

}  // namespace

std::vector<int> IntRange::values() const {
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

std::string IntRange::ToString() const { return fmt::format("{}..{}", lo, hi); }

IntRange IntRange::Parse(const std::string& text) {
  const auto dots = text.find("..");
  IntRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = ParseInt(text, text);
  } else {
    r.lo = ParseInt(std::string_view(text).substr(0, dots), text);
    r.hi = ParseInt(std::string_view(text).substr(dots + 2), text);
  }
  if (r.lo > r.hi) {
    throw ParseError(fmt::format("empty range '{}'", text));
  }
  return r;
}

MacPowerBreakdown MacPower(int b_w, int b_x, int acc_width, bool is_signed) {
  if (b_w < 1 || b_x < 1 || acc_width < 1) {
    throw ContractViolation("bit widths must be positive");
  }
  if (acc_width < b_w + b_x) {
    throw ContractViolation(fmt::format(
        "B={} cannot represent a {}-bit product", acc_width, b_w + b_x));
  }
  const double b = std::max(b_w, b_x);
  const double b_acc = b_w + b_x;
  MacPowerBreakdown p;
  p.params = {b_w, b_x, acc_width, is_signed};
  p.mult_input_a = 0.5 * b_w;
  p.mult_input_b = 0.5 * b_x;
  p.mult_internal = 0.5 * b * b;
  // Sign extension makes the whole B-bit bus flip with the product sign.
  p.acc_input = is_signed ? 0.5 * acc_width : 0.5 * b_acc;
  p.acc_sum = 0.5 * b_acc;
  p.ff = 0.5 * b_acc;
  p.mult = p.mult_input_a + p.mult_input_b + p.mult_internal;
  p.acc = p.acc_input + p.acc_sum + p.ff;
  p.total = p.mult + p.acc;
  return p;
}

PannPowerBreakdown PannPowerComponents(double r, int bx_tilde) {
  if (r < 0) throw ContractViolation("addition factor must be >= 0");
  if (bx_tilde < 1) throw ContractViolation("activation width must be >= 1");
  PannPowerBreakdown p;
  p.acc_input = 0.5 * bx_tilde;
  p.acc_sum = 0.5 * r * bx_tilde;
  p.ff = p.acc_sum;
  p.total = p.acc_input + p.acc_sum + p.ff;
  return p;
}

double PannPower(double r, int bx_tilde) {
  PannPowerComponents(r, bx_tilde);
  return (r + 0.5) * bx_tilde;
}

PowerBudget UnsignedMacBudget(int b) {
  return {MacPower(b, b, 2 * b, false).total};
}

EqualPowerResult EqualPowerPoints(PowerBudget budget, IntRange range) {
  EqualPowerResult out;
  for (int bx : range.values()) {
    if (bx < 1) throw ContractViolation("activation width must be >= 1");
    const double r = budget.p / bx - 0.5;
    if (r > 0) {
      out.points.push_back({bx, r});
    } else {
      out.omitted.push_back(bx);
    }
  }
  if (out.points.empty()) {
    throw InfeasibleBudget(fmt::format(
        "budget too small: P={} admits no width in {}; need P > {}", budget.p,
        range.ToString(), 0.5 * std::max(range.lo, 1)));
  }
  return out;
}

double UnsignedPowerSave(int b, int acc_width) {
  return 1.0 - MacPower(b, b, acc_width, false).total /
                   MacPower(b, b, acc_width, true).total;
}

int RequiredAccWidth(int b_x, int b_w, int kernel, int c_in) {
  if (b_x < 1 || b_w < 1 || kernel < 1 || c_in < 1) {
    throw ContractViolation("accumulator width inputs must be positive");
  }
  const std::uint64_t fan_in =
      static_cast<std::uint64_t>(kernel) * kernel * c_in;
  const int log2_floor = std::bit_width(fan_in) - 1;
  return b_x + b_w + 1 + log2_floor;
}

double NetworkPower(double per_mac, double mac_count) {
  if (per_mac < 0 || mac_count < 0) {
    throw ContractViolation("network power inputs must be non-negative");
  }
  return per_mac * mac_count;
}

}  // namespace pann
