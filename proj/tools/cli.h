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

#ifndef PANN_TOOLS_CLI_H_
#define PANN_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pann {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitGateFailed = 1;
constexpr int kExitInputError = 2;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);
int RunCli(int argc, char** argv);

}  // namespace pann

#endif  // PANN_TOOLS_CLI_H_
