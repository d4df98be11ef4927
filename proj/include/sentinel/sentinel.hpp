// Copyright 2026 The Sentinel Authors
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

#pragma once

#include "sentinel/attestation.hpp"
#include "sentinel/compression.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/ecdsa.hpp"
#include "sentinel/lattice.hpp"
#include "sentinel/merkle.hpp"
#include "sentinel/model.hpp"
#include "sentinel/model_io.hpp"
#include "sentinel/predicate.hpp"
#include "sentinel/synthetic.hpp"
#include "sentinel/work_pool.hpp"
