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
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "doctest.h"
#include "json.hpp"
#include "pann/io.h"

using namespace pann;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Tmp(const std::string& name) {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "pann_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return (dir / name).string();
}

std::vector<std::string> Lines(const std::string& text, std::size_t n) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < n && std::getline(in, line)) lines.push_back(line);
  return lines;
}

const std::string kModel = PANN_DATA_DIR "/digits_model.json";
const std::string kData = PANN_DATA_DIR "/digits";

double Cell(const std::string& csv, const std::string& key, std::size_t col) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!cells.empty() && cells[0] == key) return std::stod(cells.at(col));
  }
  FAIL("row " << key << " missing");
  return 0;
}

}  // namespace

TEST_CASE("simulate writes a versioned toggle report") {
  const std::string out = Tmp("sim.csv");
  const Run r = Cli({"simulate", "--bw", "4", "--bx", "4", "--B", "32", "--signed",
                     "--n", "6000", "--seed", "1", "--out", out});
  REQUIRE(r.code == kExitOk);
  const std::string csv = ReadTextFile(out);
  CHECK(Lines(csv, 2) == std::vector<std::string>{
                             "# schema=toggle-report format_version=1",
                             "component,measured_avg,predicted,relative_error"});
  CHECK(Cell(csv, "acc_input", 2) == 16);
  CHECK(std::abs(Cell(csv, "acc_input", 1) - 16) <= 0.07 * 16);
  const json m = json::parse(ReadTextFile(ManifestPathFor(out)));
  CHECK(m["command"] == "simulate");
  CHECK(m["seed"] == 1);
  CHECK(m["format_version"] == kFormatVersion);
  CHECK(m["config"]["b_w"] == 4);
}

TEST_CASE("simulate with unsigned operands predicts b for the input bus") {
  const std::string out = Tmp("sim_u.csv");
  REQUIRE(Cli({"simulate", "--bw", "4", "--bx", "4", "--signed=false", "--n", "2000",
               "--seed", "1", "--out", out}).code == kExitOk);
  CHECK(Cell(ReadTextFile(out), "acc_input", 2) == 4);
}

TEST_CASE("input errors exit with code 2") {
  Run r = Cli({"simulate", "--n", "1", "--seed", "1"});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("n_samples") != std::string::npos);
  CHECK(Cli({"simulate", "--n", "100"}).code == kExitInputError);  // no seed
  CHECK(Cli({"simulate", "--bw", "0", "--seed", "1"}).code == kExitInputError);
  CHECK(Cli({"frobnicate"}).code == kExitInputError);
  r = Cli({"quantize", "--model", "/no/such/model.json", "--mode", "ruq", "--bits", "4",
           "--out", Tmp("x.json")});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("/no/such/model.json") != std::string::npos);
  CHECK(Cli({"budget-search", "--model", kModel, "--data", kData, "--split", "calib",
             "--budget", "10"}).code == kExitInputError);
}

TEST_CASE("validate-models lists offending rows") {
  const std::string out = Tmp("val.csv");
  const Run r = Cli({"validate-models", "--bits", "2..3", "--n", "3000", "--seed", "2",
                     "--out", out});
  CHECK((r.code == kExitOk || r.code == kExitGateFailed));
  const std::string csv = ReadTextFile(out);
  CHECK(Lines(csv, 2) ==
        std::vector<std::string>{
            "# schema=model-validation format_version=1",
            "sweep,b_w,b_x,signed,component,measured_avg,predicted,relative_error,"
            "tolerance,pass"});
  // 2 widths x 2 signedness x 9 components, plus mult_total for the mixed
  // sweep at b_x=3.
  std::size_t rows = 0, failed = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("square,", 0) == 0 || line.rfind("mixed,", 0) == 0) ++rows;
    if (line.size() > 3 && line.substr(line.size() - 3) == ",no") ++failed;
  }
  CHECK(rows == 2 * 2 * 9 + 2 * 2);
  CHECK((failed > 0) == (r.code == kExitGateFailed));
  if (failed > 0) CHECK(r.err.find("outside tolerance") != std::string::npos);
}

TEST_CASE("mixed-width model row") {
  const std::string out = Tmp("mixed.csv");
  Cli({"validate-models", "--bits", "4..8", "--n", "2000", "--seed", "3", "--out", out});
  const std::string csv = ReadTextFile(out);
  std::istringstream in(csv);
  std::string line;
  double pred = 0;
  while (std::getline(in, line)) {
    if (line.rfind("mixed,4,8,true,mult_total,", 0) == 0) {
      std::stringstream ss(line);
      std::string c;
      for (int i = 0; i < 7; ++i) std::getline(ss, c, ',');
      pred = std::stod(c);
    }
  }
  CHECK(pred == 0.5 * 64 + 0.5 * (4 + 8));
}

TEST_CASE("quantize: sign split keeps the function") {
  const std::string out = Tmp("split.json");
  const Run r = Cli({"quantize", "--model", kModel, "--mode", "unsigned-split",
                     "--seed", "5", "--out", out});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(ReadTextFile(out));
  CHECK(j["format_version"] == kFormatVersion);
  CHECK(Cli({"quantize", "--model", kModel, "--mode", "unsigned-split", "--out",
             Tmp("split2.json")}).code == kExitInputError);
}

TEST_CASE("quantize: pann at a budget records a matching configuration") {
  const std::string out = Tmp("pann.json");
  REQUIRE(Cli({"quantize", "--model", kModel, "--mode", "pann", "--budget", "10",
               "--calib", PANN_DATA_DIR "/digits_calib.csv", "--out", out}).code == kExitOk);
  const json m = json::parse(ReadTextFile(ManifestPathFor(out)));
  const double r = m["config"]["r"], b = m["config"]["bx_tilde"];
  CHECK(std::abs((r + 0.5) * b - 10) <= 1e-9);
  const json s = json::parse(ReadTextFile(out + ".storage.json"));
  for (const char* k : {"achieved_addition_factor", "activation_mem_factor", "b_r",
                        "format_version", "latency_factor", "max_abs_q",
                        "weight_mem_factor"}) {
    CHECK(s.contains(k));
  }
  const json q = json::parse(ReadTextFile(out));
  CHECK(q["kind"] == "quantized-model");
  const QuantizedTensor t = QuantizedTensorFromJson(q["layers"][0]["rows"][0]);
  CHECK(t.is_signed);
  CHECK(t.q.size() == 64);
}

TEST_CASE("mse ratio curve, uniform model") {
  const std::string out = Tmp("mse.csv");
  REQUIRE(Cli({"mse", "--curve", "ratio", "--dist", "uniform", "--bits", "2..8", "--out",
               out}).code == kExitOk);
  const std::string csv = ReadTextFile(out);
  CHECK(Lines(csv, 2) == std::vector<std::string>{
                             "# schema=mse-ratio format_version=1",
                             "b,P,bx_tilde,mse_ruq,mse_pann,ratio"});
  CHECK(Cell(csv, "2", 5) > 1);
  CHECK(Cell(csv, "8", 5) < 1);
  CHECK(Cli({"mse", "--dist", "gaussian", "--bits", "2..3"}).code == kExitInputError);
}

TEST_CASE("budget search output") {
  const std::string out = Tmp("bs.json");
  REQUIRE(Cli({"budget-search", "--model", kModel, "--data", kData, "--split", "val",
               "--budget", "10", "--brange", "2..8", "--out", out}).code == kExitOk);
  const json j = json::parse(ReadTextFile(out));
  CHECK(j["format_version"] == kFormatVersion);
  REQUIRE(j["rows"].size() == 7);
  double best = 0;
  for (const json& row : j["rows"]) best = std::max(best, row["accuracy"].get<double>());
  CHECK(j["chosen"]["accuracy"] == best);
  CHECK(j["chosen"]["predicted_power"] == 10.0);
  const Run r = Cli({"budget-search", "--model", kModel, "--data", kData, "--split", "val",
                     "--budget", "0.5", "--out", Tmp("bs0.json")});
  CHECK(r.code == kExitGateFailed);
  CHECK(r.err.find("need P >") != std::string::npos);
}

TEST_CASE("tradeoff frontier") {
  const std::string out = Tmp("to.csv");
  REQUIRE(Cli({"tradeoff", "--model", kModel, "--data", kData, "--split", "val",
               "--budget", "10", "--baseline-bits", "2", "--out", out}).code == kExitOk);
  const std::string csv = ReadTextFile(out);
  CHECK(Lines(csv, 2) == std::vector<std::string>{
                             "# schema=tradeoff format_version=1",
                             "bx_tilde,latency,b_r,act_mem,weight_mem,accuracy"});
  for (int b = 2; b <= 8; ++b) CHECK(Cell(csv, std::to_string(b), 3) == b / 2.0);
  CHECK(std::trunc(Cell(csv, "6", 1) * 100) == 116);
  CHECK(Cell(csv, "8", 1) == 0.75);
}

TEST_CASE("replaying a manifest reproduces the output bytes") {
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--mult", "serial", "--dist", "gaussian", "--n", "3000", "--seed", "9",
       "--out", Tmp("r_sim.csv")},
      {"mse", "--dist", "gaussian", "--bits", "2..4", "--d", "64", "--trials", "1000",
       "--seed", "4", "--out", Tmp("r_mse.csv")},
      {"tradeoff", "--model", kModel, "--data", kData, "--split", "val", "--budget", "10",
       "--calib-samples", "64", "--seed", "2", "--out", Tmp("r_to.csv")},
  };
  for (const auto& cmd : commands) {
    REQUIRE(Cli(cmd).code == kExitOk);
    const std::string path = cmd.back();
    const std::string first = ReadTextFile(path);
    const std::string manifest = ReadTextFile(ManifestPathFor(path));
    fs::remove(path);
    REQUIRE(Cli({"replay", "--manifest", ManifestPathFor(path)}).code == kExitOk);
    CHECK(ReadTextFile(path) == first);
    CHECK(ReadTextFile(ManifestPathFor(path)) == manifest);
  }
}
