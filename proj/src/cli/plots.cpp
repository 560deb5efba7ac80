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

#include "socialmask/cli/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace socialmask::cli
{

namespace
{

struct Series
{
  std::string name;
  std::int64_t agent_id = 0;
  std::vector<TrackSample> samples;
};

std::vector<Series> collect(const PredictionInstance & inst, const Prediction & pred)
{
  std::vector<Series> out;
  out.push_back({"history", inst.target.agent_id, inst.target.samples});
  Series gt{"ground_truth", inst.target.agent_id, {}};
  for (std::size_t s = 0; s < inst.ground_truth.size(); ++s) {
    gt.samples.push_back({inst.anchor_t + static_cast<std::int64_t>(s) + 1, inst.ground_truth[s]});
  }
  out.push_back(gt);
  Series p{"prediction", inst.target.agent_id, {}};
  for (std::size_t s = 0; s < pred.points.dim(0); ++s) {
    p.samples.push_back({inst.anchor_t + static_cast<std::int64_t>(s) + 1,
                         {pred.points[s * 3], pred.points[s * 3 + 1], pred.points[s * 3 + 2]}});
  }
  out.push_back(p);
  for (const auto & n : inst.neighbors) {
    out.push_back({"neighbor", n.agent_id, n.samples});
  }
  return out;
}

}  // namespace

std::string trajectory_csv(const PredictionInstance & instance, const Prediction & prediction)
{
  std::ostringstream out;
  out.precision(9);
  out << "series,agent_id,t,x,y,z\n";
  for (const auto & s : collect(instance, prediction)) {
    for (const auto & p : s.samples) {
      out << s.name << ',' << s.agent_id << ',' << p.t << ',' << p.position.x << ',' << p.position.y << ','
          << p.position.z << '\n';
    }
  }
  return out.str();
}

std::string trajectory_svg(const PredictionInstance & instance, const Prediction & prediction)
{
  const auto series = collect(instance, prediction);
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  for (const auto & s : series) {
    for (const auto & p : s.samples) {
      lo_x = std::min(lo_x, p.position.x);
      hi_x = std::max(hi_x, p.position.x);
      lo_y = std::min(lo_y, p.position.y);
      hi_y = std::max(hi_y, p.position.y);
    }
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0}) * 1.1;
  const double cx = 0.5 * (lo_x + hi_x);
  const double cy = 0.5 * (lo_y + hi_y);
  constexpr double kSize = 480.0;
  auto px = [&](const Vec3 & v) {
    std::ostringstream o;
    o.precision(6);
    o << (v.x - cx) / span * kSize + kSize / 2 << ',' << kSize / 2 - (v.y - cy) / span * kSize;
    return o.str();
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize + 20
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize + 20 << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto & s : series) {
    const char * color = s.name == "history"        ? "#1f4e9c"
                         : s.name == "ground_truth" ? "#2a8a3e"
                         : s.name == "prediction"   ? "#c0392b"
                                                    : "#9a9a9a";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto & p : s.samples) {
      out << px(p.position) << ' ';
    }
    out << "\"/>\n";
    for (const auto & p : s.samples) {
      const auto xy = px(p.position);
      const auto comma = xy.find(',');
      out << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
    }
  }
  out << "<text x=\"6\" y=\"" << kSize + 14 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << instance.instance_id << "  history (blue), ground truth (green), prediction (red), neighbors (gray); "
      << span << " m across</text>\n</svg>\n";
  return out.str();
}

std::string mask_csv(const Tensor<float> & mask)
{
  if (mask.rank() != 2 || mask.dim(0) != mask.dim(1)) {
    throw ShapeError("mask_csv: mask must be square, got " + format_shape(mask.shape()));
  }
  const std::size_t k = mask.dim(0);
  std::ostringstream out;
  out.precision(9);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      out << (c == 0 ? "" : ",") << mask[r * k + c];
    }
    out << '\n';
  }
  return out.str();
}

std::string mask_svg(const Tensor<float> & mask)
{
  if (mask.rank() != 2 || mask.dim(0) != mask.dim(1)) {
    throw ShapeError("mask_svg: mask must be square, got " + format_shape(mask.shape()));
  }
  const std::size_t k = mask.dim(0);
  constexpr double kCell = 36.0;
  const double top = *std::max_element(mask.data().begin(), mask.data().end());
  std::ostringstream out;
  out.precision(6);
  const double side = kCell * static_cast<double>(k);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side + 20
      << "\" viewBox=\"0 0 " << side << ' ' << side + 20 << "\">\n";
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      const double v = top > 0.0 ? mask[r * k + c] / top : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      // Row r holds offsets dy, so it is drawn from the bottom.
      out << "<rect x=\"" << static_cast<double>(c) * kCell << "\" y=\"" << static_cast<double>(k - 1 - r) * kCell
          << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"rgb(255," << shade << ',' << shade
          << ")\"><title>row " << r << " col " << c << ": " << mask[r * k + c] << "</title></rect>\n";
    }
  }
  const double mid = static_cast<double>(k / 2) * kCell;
  out << "<rect x=\"" << mid << "\" y=\"" << static_cast<double>(k - 1 - k / 2) * kCell << "\" width=\"" << kCell
      << "\" height=\"" << kCell << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n"
      << "<text x=\"4\" y=\"" << side + 14 << "\" font-family=\"sans-serif\" font-size=\"12\">attention mask, max "
      << top << " (target cell outlined)</text>\n</svg>\n";
  return out.str();
}

}  // namespace socialmask::cli
