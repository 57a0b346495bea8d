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

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "topocl/graph.hpp"

namespace topocl {

// A loaded dataset. Graph labels and node labels are remapped to dense
// 0-based ids; class_values / node_label_values keep the original values
// so the mapping can be reported and round-tripped.
struct DatasetBundle {
  std::vector<Graph> graphs;
  int label_vocab_size = 1;
  int class_count = 0;
  std::string name;
  bool has_node_labels = false;
  bool has_node_attributes = false;
  std::vector<int> class_values;       // dense id -> original label
  std::vector<int> node_label_values;  // dense id -> original label
  std::vector<double> mean_feature;    // over all nodes of all graphs

  std::size_t size() const { return graphs.size(); }
};

inline bool bundles_equal(const DatasetBundle& a, const DatasetBundle& b) {
  return a.graphs == b.graphs && a.label_vocab_size == b.label_vocab_size &&
         a.class_count == b.class_count;
}

namespace detail {

inline long parse_long(const std::string& token, const std::string& file,
                       std::size_t line) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(token, &pos);
  } catch (const std::exception&) {
    throw ParseError(file + ":" + std::to_string(line) +
                     ": non-integer token '" + token + "'");
  }
  while (pos < token.size() &&
         (token[pos] == ' ' || token[pos] == '\r' || token[pos] == '\t')) {
    ++pos;
  }
  if (pos != token.size()) {
    throw ParseError(file + ":" + std::to_string(line) +
                     ": non-integer token '" + token + "'");
  }
  return value;
}

inline std::string trimmed(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  while (!lines.empty() && trimmed(lines.back()).empty()) lines.pop_back();
  return lines;
}

// Dense remap: original -> 0..k-1 in sorted order of the originals.
inline std::map<int, int> dense_remap(const std::vector<int>& values) {
  std::vector<int> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    remap[distinct[i]] = static_cast<int>(i);
  }
  return remap;
}

inline void append_one_hot_features(DatasetBundle& bundle) {
  for (auto& g : bundle.graphs) {
    g.node_features.assign(g.num_nodes,
                           std::vector<double>(bundle.label_vocab_size, 0.0));
    for (int v = 0; v < g.num_nodes; ++v) {
      g.node_features[v][g.node_labels[v]] = 1.0;
    }
  }
}

inline void compute_mean_feature(DatasetBundle& bundle) {
  bundle.mean_feature.clear();
  std::size_t count = 0;
  for (const auto& g : bundle.graphs) {
    for (const auto& row : g.node_features) {
      if (bundle.mean_feature.empty()) {
        bundle.mean_feature.assign(row.size(), 0.0);
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        bundle.mean_feature[i] += row[i];
      }
      ++count;
    }
  }
  if (count > 0) {
    for (double& x : bundle.mean_feature) x /= static_cast<double>(count);
  }
}

}  // namespace detail

// Loads a dataset in the TUDataset text layout. The directory must hold
// <name>_A.txt, <name>_graph_indicator.txt and <name>_graph_labels.txt;
// <name>_node_labels.txt and <name>_node_attributes.txt are optional.
// Edges are 1-indexed global node pairs, listed in both directions; they
// collapse into unordered pairs and all indices are rebased to 0. When no
// attribute file exists, features are one-hot encodings of node labels.
inline DatasetBundle load_tudataset(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw IngestError("not a directory: " + directory.string());
  }

  std::string prefix;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string fname = entry.path().filename().string();
    const std::string suffix = "_A.txt";
    if (fname.size() > suffix.size() &&
        fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) ==
            0) {
      prefix = fname.substr(0, fname.size() - suffix.size());
      break;
    }
  }
  if (prefix.empty()) {
    throw IngestError("missing required file *_A.txt in " +
                      directory.string());
  }

  const auto file = [&](const std::string& suffix) {
    return directory / (prefix + suffix);
  };
  for (const char* required :
       {"_A.txt", "_graph_indicator.txt", "_graph_labels.txt"}) {
    if (!fs::exists(file(required))) {
      throw IngestError("missing required file " + prefix + required +
                        " in " + directory.string());
    }
  }

  // Graph indicator: 1-indexed graph id per node line.
  const std::string ind_name = prefix + "_graph_indicator.txt";
  const auto ind_lines = detail::read_lines(file("_graph_indicator.txt"));
  const std::size_t total_nodes = ind_lines.size();
  std::vector<int> node_graph(total_nodes);   // 0-based graph id per node
  std::vector<int> node_local(total_nodes);   // index within its graph
  int graph_count = 0;
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const long gid = detail::parse_long(detail::trimmed(ind_lines[i]),
                                        ind_name, i + 1);
    if (gid < 1) {
      throw IngestError(ind_name + ":" + std::to_string(i + 1) +
                        ": graph id " + std::to_string(gid) + " < 1");
    }
    node_graph[i] = static_cast<int>(gid - 1);
    graph_count = std::max(graph_count, static_cast<int>(gid));
  }
  std::vector<int> nodes_per_graph(graph_count, 0);
  for (std::size_t i = 0; i < total_nodes; ++i) {
    node_local[i] = nodes_per_graph[node_graph[i]]++;
  }
  for (int gid = 0; gid < graph_count; ++gid) {
    if (nodes_per_graph[gid] == 0) {
      throw IngestError(ind_name + ": graph id " + std::to_string(gid + 1) +
                        " has no nodes");
    }
  }

  // Graph labels, one per graph line, remapped to dense 0-based ids.
  const std::string glab_name = prefix + "_graph_labels.txt";
  const auto glab_lines = detail::read_lines(file("_graph_labels.txt"));
  if (static_cast<int>(glab_lines.size()) != graph_count) {
    throw IngestError(glab_name + ": " + std::to_string(glab_lines.size()) +
                      " labels for " + std::to_string(graph_count) +
                      " graphs");
  }
  std::vector<int> graph_labels_raw(graph_count);
  for (int gid = 0; gid < graph_count; ++gid) {
    graph_labels_raw[gid] = static_cast<int>(detail::parse_long(
        detail::trimmed(glab_lines[gid]), glab_name, gid + 1));
  }
  const auto class_remap = detail::dense_remap(graph_labels_raw);

  // Node labels are optional; absent means label 0 everywhere.
  std::vector<int> node_labels_raw(total_nodes, 0);
  const bool has_node_labels = fs::exists(file("_node_labels.txt"));
  if (has_node_labels) {
    const std::string nlab_name = prefix + "_node_labels.txt";
    const auto nlab_lines = detail::read_lines(file("_node_labels.txt"));
    if (nlab_lines.size() != total_nodes) {
      throw IngestError(nlab_name + ": " + std::to_string(nlab_lines.size()) +
                        " labels for " + std::to_string(total_nodes) +
                        " nodes");
    }
    for (std::size_t i = 0; i < total_nodes; ++i) {
      node_labels_raw[i] = static_cast<int>(detail::parse_long(
          detail::trimmed(nlab_lines[i]), nlab_name, i + 1));
    }
  }
  const auto label_remap = detail::dense_remap(node_labels_raw);

  // Optional real-valued node attributes, comma separated per node line.
  std::vector<std::vector<double>> node_attrs;
  const bool has_node_attributes = fs::exists(file("_node_attributes.txt"));
  if (has_node_attributes) {
    const std::string attr_name = prefix + "_node_attributes.txt";
    const auto attr_lines = detail::read_lines(file("_node_attributes.txt"));
    if (attr_lines.size() != total_nodes) {
      throw IngestError(attr_name + ": " + std::to_string(attr_lines.size()) +
                        " rows for " + std::to_string(total_nodes) +
                        " nodes");
    }
    node_attrs.resize(total_nodes);
    std::size_t dim = 0;
    for (std::size_t i = 0; i < total_nodes; ++i) {
      std::stringstream ss(attr_lines[i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        tok = detail::trimmed(tok);
        std::size_t pos = 0;
        double x = 0;
        try {
          x = std::stod(tok, &pos);
        } catch (const std::exception&) {
          throw ParseError(attr_name + ":" + std::to_string(i + 1) +
                           ": non-numeric token '" + tok + "'");
        }
        node_attrs[i].push_back(x);
      }
      if (i == 0) {
        dim = node_attrs[i].size();
      } else if (node_attrs[i].size() != dim) {
        throw IngestError(attr_name + ":" + std::to_string(i + 1) +
                          ": attribute dimension mismatch");
      }
    }
  }

  // Edges: "u, v" with 1-indexed global node ids.
  const std::string a_name = prefix + "_A.txt";
  const auto a_lines = detail::read_lines(file("_A.txt"));
  std::vector<std::vector<Edge>> edges_per_graph(graph_count);
  for (std::size_t i = 0; i < a_lines.size(); ++i) {
    const std::string line = detail::trimmed(a_lines[i]);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(a_name + ":" + std::to_string(i + 1) +
                       ": expected 'u, v', got '" + line + "'");
    }
    const long u = detail::parse_long(detail::trimmed(line.substr(0, comma)),
                                      a_name, i + 1);
    const long v = detail::parse_long(detail::trimmed(line.substr(comma + 1)),
                                      a_name, i + 1);
    if (u < 1 || v < 1 || u > static_cast<long>(total_nodes) ||
        v > static_cast<long>(total_nodes)) {
      throw IngestError(a_name + ":" + std::to_string(i + 1) + ": edge (" +
                        std::to_string(u) + "," + std::to_string(v) +
                        ") references a node outside 1.." +
                        std::to_string(total_nodes));
    }
    const int gu = node_graph[u - 1];
    const int gv = node_graph[v - 1];
    if (gu != gv) {
      throw IngestError(a_name + ":" + std::to_string(i + 1) + ": edge (" +
                        std::to_string(u) + "," + std::to_string(v) +
                        ") crosses graphs " + std::to_string(gu + 1) +
                        " and " + std::to_string(gv + 1));
    }
    if (u == v) {
      throw IngestError(a_name + ":" + std::to_string(i + 1) +
                        ": self-loop at node " + std::to_string(u));
    }
    edges_per_graph[gu].emplace_back(node_local[u - 1], node_local[v - 1]);
  }

  DatasetBundle bundle;
  bundle.name = prefix;
  bundle.has_node_labels = has_node_labels;
  bundle.has_node_attributes = has_node_attributes;
  bundle.class_count = static_cast<int>(class_remap.size());
  bundle.label_vocab_size = static_cast<int>(label_remap.size());
  bundle.class_values.resize(class_remap.size());
  for (const auto& [orig, dense] : class_remap) {
    bundle.class_values[dense] = orig;
  }
  bundle.node_label_values.resize(label_remap.size());
  for (const auto& [orig, dense] : label_remap) {
    bundle.node_label_values[dense] = orig;
  }

  std::vector<std::vector<int>> labels_per_graph(graph_count);
  std::vector<std::vector<std::vector<double>>> attrs_per_graph(graph_count);
  for (int gid = 0; gid < graph_count; ++gid) {
    labels_per_graph[gid].resize(nodes_per_graph[gid]);
    if (has_node_attributes) {
      attrs_per_graph[gid].resize(nodes_per_graph[gid]);
    }
  }
  for (std::size_t i = 0; i < total_nodes; ++i) {
    labels_per_graph[node_graph[i]][node_local[i]] =
        label_remap.at(node_labels_raw[i]);
    if (has_node_attributes) {
      attrs_per_graph[node_graph[i]][node_local[i]] = node_attrs[i];
    }
  }

  bundle.graphs.reserve(graph_count);
  for (int gid = 0; gid < graph_count; ++gid) {
    bundle.graphs.push_back(make_graph(
        nodes_per_graph[gid], std::move(edges_per_graph[gid]),
        std::move(labels_per_graph[gid]), std::move(attrs_per_graph[gid]),
        class_remap.at(graph_labels_raw[gid])));
  }
  if (!has_node_attributes) {
    detail::append_one_hot_features(bundle);
  }
  detail::compute_mean_feature(bundle);
  return bundle;
}

// Writes a bundle back out in the TUDataset layout (both edge directions,
// 1-indexed). Dense ids are written as-is, so a save/load round trip is
// the identity on the graphs.
inline void save_tudataset(const DatasetBundle& bundle,
                           const std::filesystem::path& directory,
                           const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  std::ofstream a(directory / (name + "_A.txt"));
  std::ofstream ind(directory / (name + "_graph_indicator.txt"));
  std::ofstream glab(directory / (name + "_graph_labels.txt"));
  std::ofstream nlab(directory / (name + "_node_labels.txt"));
  if (!a || !ind || !glab || !nlab) {
    throw IngestError("cannot write dataset files to " + directory.string());
  }
  std::ofstream attr;
  if (bundle.has_node_attributes) {
    attr.open(directory / (name + "_node_attributes.txt"));
  }
  long base = 0;
  for (std::size_t gid = 0; gid < bundle.graphs.size(); ++gid) {
    const Graph& g = bundle.graphs[gid];
    for (int v = 0; v < g.num_nodes; ++v) {
      ind << (gid + 1) << "\n";
      nlab << g.node_labels[v] << "\n";
      if (bundle.has_node_attributes) {
        for (std::size_t i = 0; i < g.node_features[v].size(); ++i) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.17g", g.node_features[v][i]);
          attr << (i ? ", " : "") << buf;
        }
        attr << "\n";
      }
    }
    for (const auto& [u, v] : g.edges) {
      a << (base + u + 1) << ", " << (base + v + 1) << "\n";
      a << (base + v + 1) << ", " << (base + u + 1) << "\n";
    }
    glab << (g.graph_label ? *g.graph_label : 0) << "\n";
    base += g.num_nodes;
  }
}

}  // namespace topocl
