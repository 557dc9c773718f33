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

#include "pann/word.h"

#include <bit>

#include <fmt/format.h>

#include "pann/errors.h"

namespace pann {
namespace {

void CheckWidth(int width) {
  if (width < 1 || width > kMaxWordWidth) {
    throw ContractViolation(
        fmt::format("word width must be in [1, {}], got {}", kMaxWordWidth,
                    width));
  }
}

}  // namespace

std::uint64_t WidthMask(int width) {
  return width >= 64 ? ~0ull : (1ull << width) - 1;
}

std::int64_t MinValue(int width, bool is_signed) {
  CheckWidth(width);
  return is_signed ? -(std::int64_t{1} << (width - 1)) : 0;
}

std::int64_t MaxValue(int width, bool is_signed) {
  CheckWidth(width);
  return is_signed ? (std::int64_t{1} << (width - 1)) - 1
                   : static_cast<std::int64_t>(WidthMask(width));
}

Word EncodeWord(std::int64_t value, int width, bool is_signed) {
  const std::int64_t lo = MinValue(width, is_signed);
  const std::int64_t hi = MaxValue(width, is_signed);
  if (value < lo || value > hi) {
    throw RangeError(fmt::format(
        "value {} outside [{}, {}] for a {}-bit {} word", value, lo, hi,
        width, is_signed ? "signed" : "unsigned"));
  }
  Word w;
  w.width = width;
  w.is_signed = is_signed;
  w.bits = static_cast<std::uint64_t>(value) & WidthMask(width);
  return w;
}

std::int64_t Word::value() const {
  if (is_signed && bit(width - 1)) {
    return static_cast<std::int64_t>(bits | ~WidthMask(width));
  }
  return static_cast<std::int64_t>(bits);
}

std::int64_t DecodeWord(const Word& w) { return w.value(); }

Word ExtendWord(const Word& w, int width) {
  CheckWidth(width);
  if (width < w.width) {
    throw ContractViolation(fmt::format(
        "cannot extend a {}-bit word to {} bits", w.width, width));
  }
  Word out = w;
  out.width = width;
  if (w.is_signed && w.bit(w.width - 1)) {
    out.bits = (w.bits | ~WidthMask(w.width)) & WidthMask(width);
  }
  return out;
}

int Popcount(std::uint64_t v) { return std::popcount(v); }

int HammingToggles(const Word& prev, const Word& next) {
  if (prev.width != next.width) {
    throw ContractViolation(fmt::format(
        "toggle count between words of width {} and {}", prev.width,
        next.width));
  }
  return std::popcount(prev.bits ^ next.bits);
}

}  // namespace pann
