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

#include "pann/io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pann/errors.h"

namespace pann {

using nlohmann::json;

namespace {

const json& Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(fmt::format("{}: missing field \"{}\"", where, key));
  }
  return *it;
}

std::vector<double> NumberArray(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(fmt::format("{}: expected an array", where));
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(fmt::format("{}[{}]: expected a number", where, i));
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

void CheckVersion(const json& j, const std::string& where) {
  const auto it = j.find("format_version");
  if (it == j.end()) return;  // unversioned files are read as version 1
  if (!it->is_number_integer() || it->get<int>() != kFormatVersion) {
    throw ParseError(fmt::format("{}.format_version: unsupported value {}",
                                 where, it->dump()));
  }
}

double ParseNumber(std::string_view cell, const std::string& where) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(fmt::format("{}: bad number '{}'", where, cell));
  }
  return v;
}

}  // namespace

Model ParseModel(const json& j) {
  CheckVersion(j, "$");
  Model m;
  if (j.contains("name") && j["name"].is_string()) m.name = j["name"];
  const json& layers = Field(j, "layers", "$");
  if (!layers.is_array()) throw ParseError("$.layers: expected an array");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string where = fmt::format("$.layers[{}]", l);
    const json& lj = layers[l];
    const json& wj = Field(lj, "weights", where);
    if (!wj.is_array() || wj.empty()) {
      throw ParseError(fmt::format("{}.weights: expected a non-empty matrix", where));
    }
    DenseLayer layer;
    for (std::size_t r = 0; r < wj.size(); ++r) {
      const std::vector<double> row =
          NumberArray(wj[r], fmt::format("{}.weights[{}]", where, r));
      if (r == 0) {
        layer.weights = Matrix(wj.size(), row.size());
      } else if (row.size() != layer.weights.cols) {
        throw ValidationError(fmt::format(
            "{}.weights[{}]: row has {} entries, expected {}", where, r,
            row.size(), layer.weights.cols));
      }
      std::copy(row.begin(), row.end(), layer.weights.row(r).begin());
    }
    layer.bias = NumberArray(Field(lj, "bias", where), where + ".bias");
    const json& relu = Field(lj, "relu", where);
    if (!relu.is_boolean()) throw ParseError(where + ".relu: expected a boolean");
    layer.relu = relu.get<bool>();
    m.layers.push_back(std::move(layer));
  }
  m.Validate();
  return m;
}

Model LoadModel(const std::string& path) {
  const std::string text = ReadTextFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  try {
    return ParseModel(j);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()));
  }
}

Dataset ParseDataset(const std::string& text, const std::string& origin) {
  Dataset d;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> features;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("format_version=");
      if (pos != std::string::npos &&
          line.substr(pos + 15) != std::to_string(kFormatVersion)) {
        throw ParseError(fmt::format("{}:{}: unsupported format version", origin, line_no));
      }
      continue;
    }
    const std::string where = fmt::format("{}:{}", origin, line_no);
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() < 2) throw ParseError(where + ": need a label and features");
    const double label = ParseNumber(cells[0], where);
    if (label != static_cast<int>(label) || label < 0) {
      throw ValidationError(fmt::format("{}: label must be a non-negative integer", where));
    }
    const std::size_t dim = cells.size() - 1;
    if (d.samples.cols == 0) d.samples.cols = dim;
    if (dim != d.samples.cols) {
      throw ValidationError(fmt::format("{}: {} features, expected {}", where, dim,
                                        d.samples.cols));
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const double v = ParseNumber(cells[i], where);
      if (v < 0 || v > 1) {
        throw ValidationError(fmt::format("{}: feature {} = {} outside [0, 1]", where,
                                          i - 1, v));
      }
      d.samples.data.push_back(v);
    }
    d.labels.push_back(static_cast<int>(label));
  }
  d.samples.rows = d.labels.size();
  if (d.labels.empty()) throw ValidationError(origin + ": dataset is empty");
  return d;
}

Dataset LoadDataset(const std::string& path) {
  return ParseDataset(ReadTextFile(path), path);
}

json ToJson(const QuantizedTensor& t) {
  json j;
  j["gamma"] = t.gamma;
  j["signed"] = t.is_signed;
  j["shape"] = t.shape;
  j["q"] = t.q;
  if (t.offset != 0) j["offset"] = t.offset;
  j["addition_factor"] = t.addition_factor;
  return j;
}

QuantizedTensor QuantizedTensorFromJson(const json& j, const std::string& where) {
  QuantizedTensor t;
  const json& gamma = Field(j, "gamma", where);
  if (!gamma.is_number()) throw ParseError(where + ".gamma: expected a number");
  t.gamma = gamma.get<double>();
  const json& sign = Field(j, "signed", where);
  if (!sign.is_boolean()) throw ParseError(where + ".signed: expected a boolean");
  t.is_signed = sign.get<bool>();
  const json& shape = Field(j, "shape", where);
  const json& q = Field(j, "q", where);
  if (!shape.is_array() || !q.is_array()) {
    throw ParseError(where + ": shape and q must be arrays");
  }
  std::size_t count = 1;
  for (const json& s : shape) {
    if (!s.is_number_unsigned()) throw ParseError(where + ".shape: expected sizes");
    t.shape.push_back(s.get<std::size_t>());
    count *= t.shape.back();
  }
  for (const json& v : q) {
    if (!v.is_number_integer()) throw ParseError(where + ".q: expected integers");
    t.q.push_back(v.get<std::int64_t>());
  }
  if (count != t.q.size()) {
    throw ValidationError(fmt::format("{}: shape holds {} values, q has {}", where,
                                      count, t.q.size()));
  }
  if (j.contains("offset")) t.offset = j["offset"].get<double>();
  if (j.contains("addition_factor")) {
    t.addition_factor = j["addition_factor"].get<double>();
  } else if (!t.q.empty()) {
    double l1 = 0;
    for (std::int64_t v : t.q) l1 += std::abs(v);
    t.addition_factor = l1 / t.q.size();
  }
  return t;
}

json ToJson(const QuantizedModel& qm, const std::string& name) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "quantized-model";
  j["name"] = name;
  j["backend"] = qm.backend.Describe();
  j["layers"] = json::array();
  for (const QuantizedLayer& layer : qm.layers) {
    json lj;
    lj["relu"] = layer.relu;
    lj["bias"] = layer.bias;
    lj["act_bits"] = layer.act_bits;
    lj["act_hi"] = layer.act_hi;
    lj["rows"] = json::array();
    for (const QuantizedTensor& row : layer.rows) lj["rows"].push_back(ToJson(row));
    j["layers"].push_back(lj);
  }
  return j;
}

namespace {

json MatrixJson(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

}  // namespace

json ToJson(const std::vector<SplitLayer>& layers, const std::string& name) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "unsigned-split-model";
  j["name"] = name;
  j["layers"] = json::array();
  for (const SplitLayer& s : layers) {
    json lj;
    lj["w_plus"] = MatrixJson(s.w_plus);
    lj["w_minus"] = MatrixJson(s.w_minus);
    lj["b_plus"] = s.b_plus;
    lj["b_minus"] = s.b_minus;
    lj["relu"] = s.relu;
    j["layers"].push_back(lj);
  }
  return j;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) throw ValidationError(fmt::format("write to '{}' failed", path));
}

std::string FormatDouble(double v) { return fmt::format("{}", v); }

CsvWriter::CsvWriter(const std::string& schema,
                     const std::vector<std::string>& header)
    : columns_(header.size()) {
  out_ = fmt::format("# schema={} format_version={}\n", schema, kFormatVersion);
  Row(header);
}

void CsvWriter::Row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error("CSV row has the wrong number of cells");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

json RunManifest::ToJson() const {
  json j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  j["argv"] = argv;
  j["config"] = config;
  j["seed"] = seed;
  j["version"] = version;
  j["outputs"] = outputs;
  return j;
}

RunManifest RunManifest::FromJson(const json& j) {
  CheckVersion(j, "$");
  RunManifest m;
  try {
    m.command = Field(j, "command", "$").get<std::string>();
    m.argv = Field(j, "argv", "$").get<std::vector<std::string>>();
    m.seed = Field(j, "seed", "$").get<std::uint64_t>();
    m.version = Field(j, "version", "$").get<std::string>();
    m.outputs = Field(j, "outputs", "$").get<std::vector<std::string>>();
  } catch (const json::type_error& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  }
  if (j.contains("config")) m.config = j["config"];
  return m;
}

std::string ManifestPathFor(const std::string& output_path) {
  return output_path + ".manifest.json";
}

}  // namespace pann
