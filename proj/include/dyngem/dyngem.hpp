// Copyright 2026 The dyngem Authors.
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

#pragma once

#include "dyngem/ae_embed.hpp"
#include "dyngem/digest.hpp"
#include "dyngem/embedding.hpp"
#include "dyngem/graph.hpp"
#include "dyngem/linalg.hpp"
#include "dyngem/metrics.hpp"
#include "dyngem/mlp.hpp"
#include "dyngem/rng.hpp"
#include "dyngem/sbm.hpp"
#include "dyngem/snapshot_io.hpp"
#include "dyngem/svd_embed.hpp"
#include "dyngem/tasks.hpp"
#include "dyngem/experiment.hpp"
