// SPDX-License-Identifier: Apache-2.0
//
// fdsec: secure transmit covariance design for full-duplex bidirectional links
// Copyright (C) 2026 The fdsec authors
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
//
// Umbrella header.

#ifndef FDSEC_FDSEC_HPP
#define FDSEC_FDSEC_HPP

#include "core.hpp"
#include "rng.hpp"
#include "model.hpp"
#include "reduction.hpp"
#include "adc.hpp"
#include "multieve.hpp"
#include "conic.hpp"
#include "robust.hpp"
#include "baselines.hpp"
#include "harness.hpp"
#include "config_io.hpp"

#endif // FDSEC_FDSEC_HPP
