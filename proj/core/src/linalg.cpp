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

#include "sparsemri/linalg.hpp"

#include <random>

#include "sparsemri/error.hpp"

namespace sparsemri {

double power_iteration(Index n, const std::function<Vector(const Vector&)>& gram,
                       int iterations, std::uint64_t seed) {
  if (iterations <= 0) throw ParameterError("power_iteration: iterations must be positive");
  if (n <= 0) throw ParameterError("power_iteration: empty operator");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector w = gram(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    eig = v.dot(w);
    v = w / norm;
  }
  return eig;
}

}  // namespace sparsemri
