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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "topocl/nn.hpp"

namespace topocl {

// Text checkpoint: a header with the encoder hyperparameters, then one
// (name, shape, data) record per parameter. Doubles print as %.17g so a
// save/load round trip is bit exact.
//
//   topocl-checkpoint v1
//   dims input <d> layers <L> hidden <h> embed <e> subiso_inner <w> pooling <p>
//   param <name> <rows> <cols>
//   <rows*cols doubles, space separated, one line>
inline void save_checkpoint(const ModelParams& params,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write checkpoint " + path.string());
  const ModelDims d = dims_of(params);
  out << "topocl-checkpoint v1\n";
  out << "dims input " << d.input_dim << " layers " << d.layers << " hidden "
      << d.hidden_dim << " embed " << d.embed_dim << " subiso_inner "
      << d.subiso_inner_dim << " pooling " << to_string(d.pooling) << "\n";
  char buf[32];
  for (const auto& [name, t] : named_parameters(params)) {
    out << "param " << name << " " << t->rows << " " << t->cols << "\n";
    for (std::size_t i = 0; i < t->size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", t->value[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
}

inline ModelDims read_checkpoint_dims(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "topocl-checkpoint v1") {
    throw ParseError(path.string() + ": not a topocl checkpoint");
  }
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": missing dims header");
  }
  std::istringstream hdr(line);
  std::string tag, key, pooling;
  ModelDims d;
  hdr >> tag >> key >> d.input_dim >> key >> d.layers >> key >>
      d.hidden_dim >> key >> d.embed_dim >> key >> d.subiso_inner_dim >>
      key >> pooling;
  if (tag != "dims" || hdr.fail()) {
    throw ParseError(path.string() + ": malformed dims header");
  }
  d.pooling = pooling_from_string(pooling);
  return d;
}

// Loads a checkpoint into a freshly shaped model. Shape or name drift
// between the file and the header layout is an error.
inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  const ModelDims dims = read_checkpoint_dims(path);
  RngStream scratch(0);
  ModelParams params = init_model(dims, scratch);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // magic
  std::getline(in, line);  // dims
  for (auto& [name, t] : named_parameters(params)) {
    if (!std::getline(in, line)) {
      throw ParseError(path.string() + ": missing record for " + name);
    }
    std::istringstream hdr(line);
    std::string tag, got_name;
    int rows = 0, cols = 0;
    hdr >> tag >> got_name >> rows >> cols;
    if (tag != "param" || hdr.fail()) {
      throw ParseError(path.string() + ": malformed record '" + line + "'");
    }
    if (got_name != name) {
      throw ParseError(path.string() + ": expected parameter " + name +
                       ", found " + got_name);
    }
    if (rows != t->rows || cols != t->cols) {
      throw DimensionError(path.string() + ": " + name + " has shape " +
                           std::to_string(rows) + "x" + std::to_string(cols) +
                           ", expected " + t->shape_str());
    }
    if (!std::getline(in, line)) {
      throw ParseError(path.string() + ": missing data for " + name);
    }
    std::istringstream data(line);
    for (std::size_t i = 0; i < t->size(); ++i) {
      if (!(data >> t->value[i])) {
        throw ParseError(path.string() + ": short data row for " + name);
      }
    }
  }
  return params;
}

}  // namespace topocl
