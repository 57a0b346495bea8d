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

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "topocl/graph.hpp"

namespace fixtures {

inline topocl::Graph triangle() {
  return topocl::make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
}

inline topocl::Graph path3() {
  return topocl::make_graph(3, {{0, 1}, {1, 2}});
}

inline topocl::Graph cycle(int n) {
  std::vector<topocl::Edge> edges;
  for (int v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return topocl::make_graph(n, std::move(edges));
}

// Two disjoint triangles on six nodes, the classic refinement blind spot
// partner of the 6-cycle.
inline topocl::Graph two_triangles() {
  return topocl::make_graph(
      6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

inline topocl::Graph star(int leaves) {
  std::vector<topocl::Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return topocl::make_graph(leaves + 1, std::move(edges));
}

inline topocl::Graph with_one_hot_features(topocl::Graph g, int vocab) {
  g.node_features.assign(g.num_nodes, std::vector<double>(vocab, 0.0));
  for (int v = 0; v < g.num_nodes; ++v) {
    g.node_features[v][g.node_labels[v] % vocab] = 1.0;
  }
  return g;
}

// Unique scratch directory per test-run invocation.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() /
      ("topocl-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Raw TUDataset-format writer, independent of the library's serializer.
// Edge entries use 1-indexed global node ids exactly as given.
struct RawTuDataset {
  std::vector<std::pair<long, long>> a_lines;
  std::vector<long> graph_indicator;
  std::vector<long> graph_labels;
  std::vector<long> node_labels;  // empty to omit the file
};

inline void write_raw_tudataset(const std::filesystem::path& dir,
                                const std::string& name,
                                const RawTuDataset& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream a(dir / (name + "_A.txt"));
    for (const auto& [u, v] : data.a_lines) a << u << ", " << v << "\n";
  }
  {
    std::ofstream ind(dir / (name + "_graph_indicator.txt"));
    for (long g : data.graph_indicator) ind << g << "\n";
  }
  {
    std::ofstream gl(dir / (name + "_graph_labels.txt"));
    for (long l : data.graph_labels) gl << l << "\n";
  }
  if (!data.node_labels.empty()) {
    std::ofstream nl(dir / (name + "_node_labels.txt"));
    for (long l : data.node_labels) nl << l << "\n";
  }
}

// A 3-node triangle with both edge directions listed, as the format has it.
inline RawTuDataset raw_triangle_dataset() {
  RawTuDataset d;
  d.a_lines = {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {1, 3}, {3, 1}};
  d.graph_indicator = {1, 1, 1};
  d.graph_labels = {1};
  d.node_labels = {0, 0, 0};
  return d;
}

}  // namespace fixtures
