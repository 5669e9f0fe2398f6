// Copyright 2026 The SLIMD Authors. All Rights Reserved.
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

#ifndef SLIMD_SLIMD_HPP_
#define SLIMD_SLIMD_HPP_

#include "slimd/byte_io.hpp"
#include "slimd/container.hpp"
#include "slimd/deflate.hpp"
#include "slimd/dictionary.hpp"
#include "slimd/error.hpp"
#include "slimd/kmeans.hpp"
#include "slimd/model_select.hpp"
#include "slimd/multinomial.hpp"
#include "slimd/random.hpp"
#include "slimd/range_coder.hpp"
#include "slimd/synthetic.hpp"
#include "slimd/tensor.hpp"
#include "slimd/tensor_io.hpp"

#endif  // SLIMD_SLIMD_HPP_
