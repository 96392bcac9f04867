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

#include "sparsemri/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "sparsemri/error.hpp"
#include "sparsemri/field_io.hpp"

namespace sparsemri {
namespace {

struct Ellipse {
  double intensity;
  double semi_x;
  double semi_y;
  double centre_x;
  double centre_y;
  double angle_deg;
};

// Shepp & Logan (1974), original intensities.
constexpr Ellipse kSheppLogan[] = {
    {2.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

// Quantize so that sums of the same ellipse set compare equal.
double level_key(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

std::vector<std::uint8_t> TissueMaps::foreground() const {
  std::vector<std::uint8_t> fg(static_cast<std::size_t>(pd.size()));
  for (Index k = 0; k < pd.size(); ++k) fg[static_cast<std::size_t>(k)] = pd.data()[k] > 0.0;
  return fg;
}

double TissueMaps::mean_t1() const {
  double sum = 0.0;
  Index count = 0;
  for (Index k = 0; k < pd.size(); ++k) {
    if (pd.data()[k] > 0.0) {
      sum += t1.data()[k];
      ++count;
    }
  }
  if (count == 0) throw DegenerateInputError("tissue maps have no foreground pixels");
  return sum / static_cast<double>(count);
}

double TissueMaps::max_t1() const {
  double best = 0.0;
  bool any = false;
  for (Index k = 0; k < pd.size(); ++k) {
    if (pd.data()[k] > 0.0) {
      best = std::max(best, t1.data()[k]);
      any = true;
    }
  }
  if (!any) throw DegenerateInputError("tissue maps have no foreground pixels");
  return best;
}

void TissueMaps::validate() const {
  if (pd.rows() != t1.rows() || pd.cols() != t1.cols()) {
    throw DimensionError("tissue maps: PD and T1 shapes differ");
  }
  if ((pd.array() < 0.0).any()) throw InputError("tissue maps: negative proton density");
  if (!(t1.array() > 0.0).all()) throw InputError("tissue maps: T1 must be positive");
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::shepp_logan: return "shepp-logan";
    case PhantomKind::piecewise: return "piecewise";
    case PhantomKind::file: return "file";
  }
  return "unknown";
}

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "shepp-logan") return PhantomKind::shepp_logan;
  if (name == "piecewise") return PhantomKind::piecewise;
  if (name == "file") return PhantomKind::file;
  throw ParameterError("unknown phantom kind '" + std::string(name) + "'");
}

Image assign_t1_by_pd_rank(const Image& pd) {
  std::map<double, std::size_t> rank;
  for (Index k = 0; k < pd.size(); ++k) {
    if (pd.data()[k] > 0.0) rank.emplace(level_key(pd.data()[k]), 0);
  }
  std::size_t r = 0;
  for (auto& [level, slot] : rank) slot = r++;
  constexpr std::size_t table_size = std::size(kPhantomT1TableMs);
  Image t1(pd.rows(), pd.cols());
  for (Index k = 0; k < pd.size(); ++k) {
    const double v = pd.data()[k];
    t1.data()[k] = v > 0.0
                       ? kPhantomT1TableMs[std::min(rank.at(level_key(v)), table_size - 1)]
                       : kBackgroundT1Ms;
  }
  return t1;
}

TissueMaps make_shepp_logan(Index size) {
  if (size < 16) throw ParameterError("phantom size must be at least 16");
  Image pd = Image::Zero(size, size);
  const double n = static_cast<double>(size);
  for (Index i = 0; i < size; ++i) {
    const double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / n;
    for (Index j = 0; j < size; ++j) {
      const double x = 2.0 * (static_cast<double>(j) + 0.5) / n - 1.0;
      double v = 0.0;
      for (const Ellipse& e : kSheppLogan) {
        const double phi = e.angle_deg * std::numbers::pi / 180.0;
        const double dx = x - e.centre_x;
        const double dy = y - e.centre_y;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.semi_x * e.semi_x) + (w * w) / (e.semi_y * e.semi_y) <= 1.0) {
          v += e.intensity;
        }
      }
      pd(i, j) = std::max(0.0, level_key(v));
    }
  }
  pd /= pd.maxCoeff();
  for (Index k = 0; k < pd.size(); ++k) pd.data()[k] = level_key(pd.data()[k]);
  TissueMaps maps{pd, assign_t1_by_pd_rank(pd)};
  maps.validate();
  return maps;
}

TissueMaps make_piecewise_phantom(Index size) {
  if (size < 16) throw ParameterError("phantom size must be at least 16");
  Image pd = Image::Zero(size, size);
  const Index half = size / 2;
  pd.block(2, 2, size - 4, size - 4).setConstant(0.6);
  pd.block(4, 4, half - 4, half - 4).setConstant(1.0);
  pd.block(half, half + 1, size - half - 4, size - half - 5).setConstant(0.3);
  TissueMaps maps{pd, assign_t1_by_pd_rank(pd)};
  maps.validate();
  return maps;
}

TissueMaps load_phantom(const std::filesystem::path& pd_file,
                        const std::filesystem::path& t1_file, double t1_scale_ms) {
  if (!(t1_scale_ms > 0.0)) throw ParameterError("t1_scale_ms must be positive");
  Image pd = read_pgm(pd_file);
  Image t1_gray = read_pgm(t1_file);
  if (pd.rows() != t1_gray.rows() || pd.cols() != t1_gray.cols()) {
    throw InputError("phantom files have different dimensions");
  }
  const double peak = pd.maxCoeff();
  if (!(peak > 0.0)) throw InputError("PD image is all zero");
  pd /= peak;
  Image t1(pd.rows(), pd.cols());
  for (Index k = 0; k < pd.size(); ++k) {
    const double t = t1_gray.data()[k] * t1_scale_ms;
    t1.data()[k] = pd.data()[k] > 0.0 && t > 0.0 ? t : kBackgroundT1Ms;
  }
  TissueMaps maps{pd, t1};
  maps.validate();
  return maps;
}

TissueMaps make_phantom(const PhantomSpec& spec) {
  switch (spec.kind) {
    case PhantomKind::shepp_logan: return make_shepp_logan(spec.size);
    case PhantomKind::piecewise: return make_piecewise_phantom(spec.size);
    case PhantomKind::file: return load_phantom(spec.pd_file, spec.t1_file, spec.t1_scale_ms);
  }
  throw ParameterError("unknown phantom kind");
}

}  // namespace sparsemri
