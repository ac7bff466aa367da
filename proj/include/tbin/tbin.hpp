// Copyright 2026 The tbin Authors
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

#include "tbin/acquisition_sim.hpp"
#include "tbin/dynamic_threshold.hpp"
#include "tbin/errors.hpp"
#include "tbin/frame_stack.hpp"
#include "tbin/global_threshold.hpp"
#include "tbin/histogram.hpp"
#include "tbin/image.hpp"
#include "tbin/io.hpp"
#include "tbin/mixture.hpp"
#include "tbin/optimal_threshold.hpp"
#include "tbin/reference_data.hpp"
#include "tbin/report.hpp"
#include "tbin/sim_config.hpp"
#include "tbin/speed_compensation.hpp"
#include "tbin/temporal_threshold.hpp"
