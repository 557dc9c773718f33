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

#ifndef PANN_WORD_H_
#define PANN_WORD_H_

#include <cstdint>

namespace pann {

constexpr int kMaxWordWidth = 63;

// Fixed-width bit vector. Bit i of `bits` is bit i of the word (LSB first);
// bits at or above `width` are always zero.
struct Word {
  std::uint64_t bits = 0;
  int width = 1;
  bool is_signed = false;

  bool bit(int i) const { return (bits >> i) & 1u; }
  std::int64_t value() const;

  friend bool operator==(const Word&, const Word&) = default;
};

std::uint64_t WidthMask(int width);

// Representable interval for (width, is_signed), both ends inclusive.
std::int64_t MinValue(int width, bool is_signed);
std::int64_t MaxValue(int width, bool is_signed);

// Throws RangeError naming the allowed interval when `value` does not fit.
Word EncodeWord(std::int64_t value, int width, bool is_signed);
std::int64_t DecodeWord(const Word& w);

// Sign- or zero-extends (according to w.is_signed) to `width` >= w.width.
Word ExtendWord(const Word& w, int width);

// Number of differing bit positions. Throws ContractViolation if the widths
// differ.
int HammingToggles(const Word& prev, const Word& next);

int Popcount(std::uint64_t v);

}  // namespace pann

#endif  // PANN_WORD_H_
