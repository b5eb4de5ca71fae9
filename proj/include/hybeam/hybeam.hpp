// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "hybeam/algorithm.hpp"
#include "hybeam/channel.hpp"
#include "hybeam/common.hpp"
#include "hybeam/conic/io.hpp"
#include "hybeam/conic/problem.hpp"
#include "hybeam/conic/psd.hpp"
#include "hybeam/conic/solver.hpp"
#include "hybeam/groups.hpp"
#include "hybeam/harness/config.hpp"
#include "hybeam/harness/csv.hpp"
#include "hybeam/harness/presets.hpp"
#include "hybeam/harness/sweep.hpp"
#include "hybeam/precoding.hpp"
#include "hybeam/rng.hpp"
#include "hybeam/sdr.hpp"
