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

#include "topocl/augment.hpp"
#include "topocl/checkpoint.hpp"
#include "topocl/config.hpp"
#include "topocl/core.hpp"
#include "topocl/dataset.hpp"
#include "topocl/gradcheck.hpp"
#include "topocl/graph.hpp"
#include "topocl/loss.hpp"
#include "topocl/nn.hpp"
#include "topocl/optim.hpp"
#include "topocl/probe.hpp"
#include "topocl/structural.hpp"
#include "topocl/sweep.hpp"
#include "topocl/tensor.hpp"
#include "topocl/train.hpp"
#include "topocl/wl.hpp"
