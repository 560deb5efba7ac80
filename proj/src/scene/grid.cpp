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

#include "socialmask/scene/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace socialmask
{
namespace
{

std::optional<std::size_t> axis_cell(double offset, const GridSpec & grid)
{
  const double half = grid.region_m / 2.0;
  if (offset < -half || offset >= half) {
    return std::nullopt;
  }
  auto idx = static_cast<std::size_t>(std::floor((offset + half) / grid.cell_size()));
  // (offset + half) / width can round up to `cells` just below the upper edge.
  if (idx >= grid.cells) {
    idx = grid.cells - 1;
  }
  return idx;
}

}  // namespace

std::optional<GridCell> assign_grid_cell(double dx, double dy, const GridSpec & grid)
{
  if (!std::isfinite(dx) || !std::isfinite(dy)) {
    throw std::invalid_argument("assign_grid_cell: non-finite offset");
  }
  if (!(grid.region_m > 0.0) || grid.cells < 1) {
    throw std::invalid_argument("assign_grid_cell: region size must be positive and grid at least 1x1");
  }
  const auto row = axis_cell(dy, grid);
  const auto col = axis_cell(dx, grid);
  if (!row || !col) {
    return std::nullopt;
  }
  return GridCell{*row, *col};
}

}  // namespace socialmask
