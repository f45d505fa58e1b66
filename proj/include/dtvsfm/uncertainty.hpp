/*
Copyright 2026 The dtvsfm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <vector>

#include "dtvsfm/geometry.hpp"
#include "dtvsfm/grid.hpp"

namespace dtvsfm {

/// Per-pixel matching confidence in [0, 1].
struct ConfidenceMap : Grid<double> {
  using Grid<double>::Grid;
};

/// WBA weights w = m * c.
struct WeightMap : Grid<double> {
  using Grid<double>::Grid;
};

struct BinaryMask : Grid<std::uint8_t> {
  using Grid<std::uint8_t>::Grid;
};

/// Isotropic Gaussian mixture component of a predicted flow distribution.
struct MixtureComponent {
  double weight = 1.0;
  double variance = 1.0;  // pixels^2
};

/// Flow distribution for one pixel: mean plus mixture components.
struct PixelMixture {
  Vec2 mean = Vec2::Zero();
  std::vector<MixtureComponent> components;
};

using MixtureParams = Grid<PixelMixture>;

struct ConfidenceConfig {
  double radius = 1.0;
  bool grid_filter = false;
  int grid_cell = 4;
  double grid_quantile = 0.5;
};

/// Probability mass of one pixel's mixture within `radius` of its mean.
/// Throws kInvalidMixture.
double disc_mass(const PixelMixture& mixture, double radius);

/// Dense confidence from mixture parameters. Throws kInvalidMixture or
/// kInvalidArgument (radius <= 0).
ConfidenceMap confidence_from_mixture(const MixtureParams& params, double radius);

/// m = [c >= gamma and inlier and flow valid]. Throws kDimensionMismatch.
BinaryMask build_mask(const ConfidenceMap& conf, const BinaryMask& inliers, double gamma);
BinaryMask build_mask(const ConfidenceMap& conf, const BinaryMask& inliers, double gamma,
                      const ByteGrid& flow_valid);

/// Elementwise w = c * m. Throws kDimensionMismatch.
WeightMap make_weights(const ConfidenceMap& conf, const BinaryMask& mask);

/// Linear-interpolation empirical quantile of `values` (sorted in place).
double empirical_quantile(std::vector<double>& values, double q);

/// Zeroes entries below their tile's empirical quantile. Border tiles may be
/// smaller than cell x cell; the quantile uses the actual tile population.
ConfidenceMap local_grid_filter(const ConfidenceMap& conf, int cell, double quantile);
ConfidenceMap local_grid_filter_ref(const ConfidenceMap& conf, int cell, double quantile);

}  // namespace dtvsfm
