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

#ifndef PANN_IO_H_
#define PANN_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pann/infer.h"
#include "pann/quantize.h"

namespace pann {

constexpr int kFormatVersion = 1;

// Model file: {"format_version":1, "layers":[{"weights":[[..]], "bias":[..],
// "relu":bool}]}. Throws ParseError (with the JSON path of the bad field) or
// ValidationError.
Model ParseModel(const nlohmann::json& j);
Model LoadModel(const std::string& path);

// Dataset file: "# format_version=1" header, then "label,f0,f1,..." rows.
Dataset ParseDataset(const std::string& text, const std::string& origin);
Dataset LoadDataset(const std::string& path);

nlohmann::json ToJson(const QuantizedTensor& t);
QuantizedTensor QuantizedTensorFromJson(const nlohmann::json& j,
                                        const std::string& where = "$");

nlohmann::json ToJson(const QuantizedModel& qm, const std::string& name);
nlohmann::json ToJson(const std::vector<SplitLayer>& layers,
                      const std::string& name);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& content);

// Shortest text that round-trips, so reruns are byte-identical.
std::string FormatDouble(double v);

// CSV with a leading "# schema=<name> format_version=1" line.
class CsvWriter {
 public:
  CsvWriter(const std::string& schema, const std::vector<std::string>& header);
  void Row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // without the program name
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version = PANN_VERSION;
  std::vector<std::string> outputs;

  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& j);
};

std::string ManifestPathFor(const std::string& output_path);

}  // namespace pann

#endif  // PANN_IO_H_
