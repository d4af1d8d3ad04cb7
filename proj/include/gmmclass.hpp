// Copyright 2026 The gmmclass Authors. All Rights Reserved.
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

#ifndef GMMCLASS_GMMCLASS_HPP_
#define GMMCLASS_GMMCLASS_HPP_

#include "gmmclass/classify.hpp"
#include "gmmclass/common.hpp"
#include "gmmclass/experiments.hpp"
#include "gmmclass/linalg.hpp"
#include "gmmclass/mixture.hpp"
#include "gmmclass/parallel.hpp"
#include "gmmclass/risk.hpp"
#include "gmmclass/rng.hpp"
#include "gmmclass/spectra.hpp"
#include "gmmclass/svp.hpp"

#endif  // GMMCLASS_GMMCLASS_HPP_
