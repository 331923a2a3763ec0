// SPDX-License-Identifier: Apache-2.0
//
// covcut — downlink channel covariance reconstruction from Type I codebook
// feedback via cutting planes and analytic-center optimization.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef COVCUT_COVCUT_HPP
#define COVCUT_COVCUT_HPP

#include "covcut/center.hpp"
#include "covcut/channelgen.hpp"
#include "covcut/codebook.hpp"
#include "covcut/cutplane.hpp"
#include "covcut/feedback.hpp"
#include "covcut/hermparam.hpp"
#include "covcut/matcore.hpp"
#include "covcut/rng.hpp"
#include "covcut/sim.hpp"
#include "covcut/types.hpp"

#endif  // COVCUT_COVCUT_HPP
