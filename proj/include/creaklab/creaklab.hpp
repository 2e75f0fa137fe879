// creaklab/creaklab.hpp

// Copyright 2026  The creaklab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef CREAKLAB_CREAKLAB_HPP_
#define CREAKLAB_CREAKLAB_HPP_

#include "creaklab/adam.hpp"
#include "creaklab/autograd.hpp"
#include "creaklab/baseline.hpp"
#include "creaklab/binary.hpp"
#include "creaklab/checkpoint.hpp"
#include "creaklab/embeddings.hpp"
#include "creaklab/error.hpp"
#include "creaklab/eval.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/model.hpp"
#include "creaklab/model_config.hpp"
#include "creaklab/parallel.hpp"
#include "creaklab/pipeline.hpp"
#include "creaklab/pitch.hpp"
#include "creaklab/rng.hpp"
#include "creaklab/synth.hpp"
#include "creaklab/train.hpp"
#include "creaklab/wav.hpp"

#endif  // CREAKLAB_CREAKLAB_HPP_
