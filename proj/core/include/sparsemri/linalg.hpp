// Copyright 2026 The sparsemri Authors
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

#include <cstdint>
#include <functional>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration from a seeded Gaussian start vector (Rayleigh quotient of the
/// last iterate).
double power_iteration(Index n, const std::function<Vector(const Vector&)>& gram,
                       int iterations, std::uint64_t seed);

}  // namespace sparsemri
