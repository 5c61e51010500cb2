// simlm.hpp
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
//
// Copyright 2026 The simlm Authors.

#pragma once

#include "simlm/basemodel.hpp"
#include "simlm/corpus.hpp"
#include "simlm/distribution.hpp"
#include "simlm/errors.hpp"
#include "simlm/estimator.hpp"
#include "simlm/evaluation.hpp"
#include "simlm/experiment.hpp"
#include "simlm/rng.hpp"
#include "simlm/similarity.hpp"
#include "simlm/synthetic.hpp"
