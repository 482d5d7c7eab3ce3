// Copyright 2026 The qdcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDCSIM_QDCSIM_HPP_
#define QDCSIM_QDCSIM_HPP_

// Umbrella header for the qdcsim library.

#include "qdcsim/benchmark.hpp"
#include "qdcsim/catcomm.hpp"
#include "qdcsim/circuit.hpp"
#include "qdcsim/execute.hpp"
#include "qdcsim/gates.hpp"
#include "qdcsim/ghz.hpp"
#include "qdcsim/noise.hpp"
#include "qdcsim/state.hpp"
#include "qdcsim/topology.hpp"

#endif  // QDCSIM_QDCSIM_HPP_
