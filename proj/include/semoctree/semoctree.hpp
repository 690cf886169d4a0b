// Copyright 2026 The semoctree Authors
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

#include "semoctree/colored_graph.hpp"
#include "semoctree/compression.hpp"
#include "semoctree/error.hpp"
#include "semoctree/info_theory.hpp"
#include "semoctree/io/cloud.hpp"
#include "semoctree/io/config.hpp"
#include "semoctree/io/report.hpp"
#include "semoctree/io/tree_format.hpp"
#include "semoctree/octree_key.hpp"
#include "semoctree/pipeline.hpp"
#include "semoctree/planning.hpp"
#include "semoctree/semantic_octree.hpp"
#include "semoctree/semantics.hpp"
#include "semoctree/weights.hpp"
