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

#include "dtvsfm/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

double disc_mass(const PixelMixture& mixture, double radius) {
  if (mixture.components.empty()) {
    fail(ErrorCode::kInvalidMixture, "mixture has no components");
  }
  double total_weight = 0.0;
  double mass = 0.0;
  const double r2 = radius * radius;
  for (const MixtureComponent& c : mixture.components) {
    if (!(c.variance > 0.0) || !(c.weight >= 0.0)) {
      fail(ErrorCode::kInvalidMixture, "mixture component needs weight >= 0 and variance > 0");
    }
    total_weight += c.weight;
    // P(|y - mu| < R) for an isotropic 2D Gaussian (Rayleigh CDF).
    mass += c.weight * -std::expm1(-r2 / (2.0 * c.variance));
  }
  if (std::abs(total_weight - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidMixture, "mixture weights do not sum to one");
  }
  return std::clamp(mass, 0.0, 1.0);
}

ConfidenceMap confidence_from_mixture(const MixtureParams& params, double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::kInvalidArgument, "confidence radius must be positive");
  ConfidenceMap out(params.width(), params.height(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(params.size());
  // Validation errors are collected per pixel and rethrown outside the
  // parallel region.
  std::vector<std::uint8_t> bad(params.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = disc_mass(params[static_cast<std::size_t>(i)], radius);
    } catch (const Error&) {
      bad[static_cast<std::size_t>(i)] = 1;
    }
  }
  const auto it = std::find(bad.begin(), bad.end(), 1);
  if (it != bad.end()) {
    disc_mass(params[static_cast<std::size_t>(it - bad.begin())], radius);
  }
  return out;
}

BinaryMask build_mask(const ConfidenceMap& conf, const BinaryMask& inliers, double gamma) {
  return build_mask(conf, inliers, gamma, ByteGrid(conf.width(), conf.height(), 1));
}

BinaryMask build_mask(const ConfidenceMap& conf, const BinaryMask& inliers, double gamma,
                      const ByteGrid& flow_valid) {
  if (!conf.same_shape(inliers) || !conf.same_shape(flow_valid)) {
    fail(ErrorCode::kDimensionMismatch, "build_mask: input grids differ in size");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "build_mask: gamma must lie in [0, 1]");
  }
  BinaryMask mask(conf.width(), conf.height(), 0);
  for (std::size_t i = 0; i < conf.size(); ++i) {
    mask[i] = (conf[i] >= gamma && inliers[i] != 0 && flow_valid[i] != 0) ? 1 : 0;
  }
  return mask;
}

WeightMap make_weights(const ConfidenceMap& conf, const BinaryMask& mask) {
  if (!conf.same_shape(mask)) {
    fail(ErrorCode::kDimensionMismatch, "make_weights: confidence and mask differ in size");
  }
  WeightMap w(conf.width(), conf.height(), 0.0);
  for (std::size_t i = 0; i < conf.size(); ++i) w[i] = mask[i] != 0 ? conf[i] : 0.0;
  return w;
}

double empirical_quantile(std::vector<double>& values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

void check_filter_args(int cell, double quantile) {
  if (cell < 1) fail(ErrorCode::kInvalidArgument, "local_grid_filter: cell must be >= 1");
  if (!(quantile >= 0.0 && quantile <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "local_grid_filter: quantile must lie in [0, 1]");
  }
}

void filter_tile(const ConfidenceMap& conf, int cell, double quantile, int tx, int ty,
                 ConfidenceMap& out) {
  const int x0 = tx * cell;
  const int y0 = ty * cell;
  const int x1 = std::min(x0 + cell, conf.width());
  const int y1 = std::min(y0 + cell, conf.height());
  std::vector<double> tile;
  tile.reserve(static_cast<std::size_t>(cell) * static_cast<std::size_t>(cell));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) tile.push_back(conf(x, y));
  }
  const double threshold = empirical_quantile(tile, quantile);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) out(x, y) = conf(x, y) < threshold ? 0.0 : conf(x, y);
  }
}

}  // namespace

ConfidenceMap local_grid_filter_ref(const ConfidenceMap& conf, int cell, double quantile) {
  check_filter_args(cell, quantile);
  ConfidenceMap out = conf;
  const int tiles_x = (conf.width() + cell - 1) / cell;
  const int tiles_y = (conf.height() + cell - 1) / cell;
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) filter_tile(conf, cell, quantile, tx, ty, out);
  }
  return out;
}

ConfidenceMap local_grid_filter(const ConfidenceMap& conf, int cell, double quantile) {
  check_filter_args(cell, quantile);
  ConfidenceMap out = conf;
  const int tiles_x = (conf.width() + cell - 1) / cell;
  const int tiles_y = (conf.height() + cell - 1) / cell;
  const int tiles = tiles_x * tiles_y;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < tiles; ++t) filter_tile(conf, cell, quantile, t % tiles_x, t / tiles_x, out);
  return out;
}

}  // namespace dtvsfm
