// Copyright 2026 The socialmask Authors
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

#ifndef SOCIALMASK__SCENE__GRID_HPP_
#define SOCIALMASK__SCENE__GRID_HPP_

#include <cstddef>
#include <optional>

namespace socialmask
{

/// Square observation region of side `region_m` meters split into
/// `cells` x `cells` equal cells, centered on the target agent.
struct GridSpec
{
  double region_m = 30.0;
  std::size_t cells = 11;

  double cell_size() const { return region_m / static_cast<double>(cells); }
};

struct GridCell
{
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const GridCell &) const = default;
};

/**
 * Cell of a ground-plane offset (dx, dy) from the grid center. Rows index
 * dy, columns index dx. The region is half-open, [-m/2, m/2) on each axis;
 * offsets outside it return std::nullopt. Throws std::invalid_argument for
 * non-finite offsets or a degenerate grid.
 */
std::optional<GridCell> assign_grid_cell(double dx, double dy, const GridSpec & grid);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__GRID_HPP_
