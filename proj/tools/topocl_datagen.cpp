// Copyright 2026 The topocl Authors
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

// Writes the synthetic two-class benchmark in TUDataset text form, for
// demo runs where no real benchmark directory is available.
//
//   topocl_datagen <out-dir> [count] [seed] [name]

#include <cstdlib>
#include <iostream>
#include <string>

#include "support/synth.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: topocl_datagen <out-dir> [count] [seed] [name]\n";
    return 1;
  }
  const std::string out_dir = argv[1];
  const int count = argc > 2 ? std::atoi(argv[2]) : 188;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10)
                                      : 20260810ULL;
  const std::string name = argc > 4 ? argv[4] : "SYNTHB";
  try {
    synth::write_benchmark(out_dir, name, count, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << count << " graphs to " << out_dir << " (prefix "
            << name << ")\n";
  return 0;
}
