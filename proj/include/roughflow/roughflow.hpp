// Copyright 2026 The roughflow Authors
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

#include "roughflow/blowup_criterion.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/inequality_lab.hpp"
#include "roughflow/initial_data.hpp"
#include "roughflow/ins_solver.hpp"
#include "roughflow/norms_and_classes.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/random_fields.hpp"
#include "roughflow/spectral_field.hpp"
#include "roughflow/version.hpp"
