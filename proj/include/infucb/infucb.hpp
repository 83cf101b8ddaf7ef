// Copyright 2026 The infucb Authors.
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

#ifndef INFUCB_INFUCB_HPP
#define INFUCB_INFUCB_HPP

#include "infucb/argmax_tree.hpp"
#include "infucb/bracket_engine.hpp"
#include "infucb/campaign.hpp"
#include "infucb/confidence.hpp"
#include "infucb/engine.hpp"
#include "infucb/hardness.hpp"
#include "infucb/harness.hpp"
#include "infucb/ingest.hpp"
#include "infucb/instance.hpp"
#include "infucb/instance_io.hpp"
#include "infucb/lucb.hpp"
#include "infucb/random.hpp"
#include "infucb/recommenders.hpp"
#include "infucb/trace.hpp"
#include "infucb/verify.hpp"

#endif  // INFUCB_INFUCB_HPP
