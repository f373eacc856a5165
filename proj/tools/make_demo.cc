// Copyright 2026 The bcast Authors. All rights reserved.
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

// Writes the synthetic demo corpus used by the README walkthrough.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bcast/demo.h"

int main(int argc, char **argv) {
  CLI::App app{"Generate the bcast demo corpus"};
  std::string dir = "demo";
  std::uint64_t seed = 20240901;
  app.add_option("dir", dir, "Target directory");
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  const auto layout = bcast::demo::Generate(dir, seed);
  std::cout << "wrote " << layout.config.string() << '\n';
  return 0;
}
