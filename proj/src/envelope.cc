// Copyright 2026 The asymgame Authors. All rights reserved.
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


#include "asymgame/envelope.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace asymgame {
namespace {

// Points along one grid line, in order.
using Line = std::vector<int>;

std::vector<Line> GridLines(const BeliefGrid& grid, std::array<int, 2> d) {
  std::vector<Line> lines;
  for (int idx = 0; idx < grid.size(); ++idx) {
    const auto c = grid.Coords(idx);
    if (grid.Contains(c[0] - d[0], c[1] - d[1])) continue;
    Line line;
    for (int i = c[0], j = c[1]; grid.Contains(i, j); i += d[0], j += d[1]) {
      line.push_back(grid.Index(i, j));
    }
    if (line.size() >= 3) lines.push_back(std::move(line));
  }
  return lines;
}

// Returns the largest rise.
double HullLine(const Line& line, std::vector<double>* values) {
  std::vector<double> vals(line.size());
  for (std::size_t k = 0; k < line.size(); ++k) vals[k] = (*values)[line[k]];
  const std::vector<double> hull = ConcaveMajorant1D(vals);
  double rise = 0.0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    rise = std::max(rise, hull[k] - vals[k]);
    (*values)[line[k]] = std::max(vals[k], hull[k]);
  }
  return rise;
}

ConcavityReport SecondDifferences(const ValueField& f, double tol, double sign) {
  ConcavityReport report;
  const BeliefGrid& g = f.grid;
  auto check = [&](int prev, int mid, int next) {
    const double d2 = sign * (f.values[prev] - 2.0 * f.values[mid] + f.values[next]);
    if (d2 > report.worst) {
      report.worst = d2;
      report.worst_index = mid;
    }
  };
  if (g.dim() == 2) {
    for (int i = 1; i < g.resolution(); ++i) check(i - 1, i, i + 1);
  } else if (g.dim() == 3) {
    for (const auto& d : SweepDirections()) {
      for (int idx = 0; idx < g.size(); ++idx) {
        const auto c = g.Coords(idx);
        const int prev = g.Index(c[0] - d[0], c[1] - d[1]);
        const int next = g.Index(c[0] + d[0], c[1] + d[1]);
        if (prev >= 0 && next >= 0) check(prev, idx, next);
      }
    }
  }
  report.concave = report.worst <= tol;
  return report;
}

}  // namespace

BeliefGrid::BeliefGrid(int dim, int resolution) : dim_(dim), m_(resolution) {
  if (dim < 1 || dim > 3) {
    throw EnvelopeError("belief grids support 1 to 3 states, got " + std::to_string(dim));
  }
  if (resolution < 1) throw EnvelopeError("grid resolution must be >= 1");
  size_ = static_cast<int>(CountPoints(dim, resolution));
}

long long BeliefGrid::CountPoints(int dim, int m) {
  switch (dim) {
    case 1:
      return 1;
    case 2:
      return m + 1;
    case 3:
      return static_cast<long long>(m + 1) * (m + 2) / 2;
    default:
      throw EnvelopeError("belief grids support 1 to 3 states, got " + std::to_string(dim));
  }
}

bool BeliefGrid::Contains(int i, int j) const {
  switch (dim_) {
    case 1:
      return i == 0 && j == 0;
    case 2:
      return j == 0 && i >= 0 && i <= m_;
    default:
      return i >= 0 && j >= 0 && i + j <= m_;
  }
}

int BeliefGrid::Index(int i, int j) const {
  if (!Contains(i, j)) return -1;
  if (dim_ < 3) return i;
  // Rows i' < i hold m - i' + 1 points each.
  return i * (m_ + 1) - i * (i - 1) / 2 + j;
}

std::array<int, 2> BeliefGrid::Coords(int index) const {
  if (dim_ < 3) return {index, 0};
  int i = 0;
  int offset = 0;
  while (offset + (m_ - i + 1) <= index) {
    offset += m_ - i + 1;
    ++i;
  }
  return {i, index - offset};
}

Belief BeliefGrid::Point(int index) const {
  Belief p(dim_);
  const double m = m_;
  const auto c = Coords(index);
  switch (dim_) {
    case 1:
      p(0) = 1.0;
      break;
    case 2:
      p(0) = c[0] / m;
      p(1) = (m_ - c[0]) / m;
      break;
    default:
      p(0) = c[0] / m;
      p(1) = c[1] / m;
      p(2) = (m_ - c[0] - c[1]) / m;
  }
  return p;
}

BeliefGrid::Stencil BeliefGrid::Locate(const Belief& p) const {
  Stencil s;
  if (dim_ == 1) {
    s.count = 1;
    s.index[0] = 0;
    s.weight[0] = 1.0;
    return s;
  }
  if (dim_ == 2) {
    const double x = std::clamp(p(0), 0.0, 1.0) * m_;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, m_ - 1);
    const double w = std::clamp(x - i, 0.0, 1.0);
    s.count = 2;
    s.index = {i, i + 1, 0};
    s.weight = {1.0 - w, w, 0.0};
    return s;
  }
  double a = std::clamp(p(0), 0.0, 1.0) * m_;
  double b = std::clamp(p(1), 0.0, 1.0) * m_;
  if (a + b > m_) {
    const double excess = (a + b - m_) / 2.0;
    a = std::max(0.0, a - excess);
    b = std::max(0.0, m_ - a);
  }
  int i = std::clamp(static_cast<int>(std::floor(a)), 0, m_);
  int j = std::clamp(static_cast<int>(std::floor(b)), 0, m_ - i);
  if (i + j == m_) {
    s.count = 1;
    s.index[0] = Index(i, j);
    s.weight[0] = 1.0;
    return s;
  }
  const double fa = std::max(0.0, a - i);
  const double fb = std::max(0.0, b - j);
  if (fa + fb <= 1.0 || i + j + 2 > m_) {
    const double wa = std::min(fa, 1.0);
    const double wb = std::min(fb, 1.0 - wa);
    s.count = 3;
    s.index = {Index(i, j), Index(i + 1, j), Index(i, j + 1)};
    s.weight = {1.0 - wa - wb, wa, wb};
  } else {
    s.count = 3;
    s.index = {Index(i + 1, j), Index(i, j + 1), Index(i + 1, j + 1)};
    s.weight = {1.0 - fb, 1.0 - fa, fa + fb - 1.0};
  }
  return s;
}

double ValueField::operator()(const Belief& p) const {
  const BeliefGrid::Stencil s = grid.Locate(p);
  double out = 0.0;
  for (int k = 0; k < s.count; ++k) {
    if (s.weight[k] != 0.0) out += s.weight[k] * values[s.index[k]];
  }
  return out;
}

double ValueField::SupDistance(const ValueField& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    d = std::max(d, std::abs(values[i] - other.values[i]));
  }
  return d;
}

ValueField SampleField(const BeliefGrid& grid,
                       const std::function<double(const Belief&)>& f) {
  ValueField out(grid);
  for (int i = 0; i < grid.size(); ++i) out.values[i] = f(grid.Point(i));
  return out;
}

std::vector<double> ConcaveMajorant1D(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n <= 2) return values;
  // Monotone chain over abscissae 0..n-1; keep only right turns.
  std::vector<int> hull;
  hull.reserve(n);
  for (int k = 0; k < n; ++k) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      // Drop b if it lies on or below the chord from a to k.
      const double cross = (values[b] - values[a]) * (k - a) - (values[k] - values[a]) * (b - a);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  std::vector<double> out(n);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int a = hull[h];
    const int b = hull[h + 1];
    out[a] = values[a];
    for (int k = a + 1; k < b; ++k) {
      const double w = static_cast<double>(k - a) / (b - a);
      out[k] = std::max(values[k], (1.0 - w) * values[a] + w * values[b]);
    }
  }
  out[n - 1] = values[n - 1];
  return out;
}

std::vector<double> ConvexMinorant1D(const std::vector<double>& values) {
  std::vector<double> neg(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) neg[i] = -values[i];
  std::vector<double> out = ConcaveMajorant1D(neg);
  for (double& v : out) v = -v;
  return out;
}

const std::vector<std::array<int, 2>>& SweepDirections() {
  static const std::vector<std::array<int, 2>> kDirections = {
      {1, 0}, {0, 1}, {1, -1}, {1, 1}, {2, -1}, {1, -2}, {2, 1}, {1, 2},
  };
  return kDirections;
}

ValueField Cav(const ValueField& f, const EnvelopeOptions& options) {
  const BeliefGrid& g = f.grid;
  ValueField out = f;
  if (g.dim() == 1) return out;
  if (g.dim() == 2) {
    out.values = ConcaveMajorant1D(f.values);
    return out;
  }
  std::vector<std::vector<Line>> lines;
  for (const auto& d : SweepDirections()) lines.push_back(GridLines(g, d));
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double rise = 0.0;
    for (const auto& family : lines) {
      const int count = static_cast<int>(family.size());
#pragma omp parallel for reduction(max : rise) schedule(static)
      for (int l = 0; l < count; ++l) {
        rise = std::max(rise, HullLine(family[l], &out.values));
      }
    }
    if (rise <= options.sweep_tolerance) return out;
  }
  throw EnvelopeError("cav sweeps did not settle within " +
                      std::to_string(options.max_sweeps) + " sweeps");
}

ValueField Vex(const ValueField& f, const EnvelopeOptions& options) {
  ValueField neg = f;
  for (double& v : neg.values) v = -v;
  ValueField out = Cav(neg, options);
  for (double& v : out.values) v = -v;
  return out;
}

ConcavityReport CheckConcave(const ValueField& f, double tol) {
  return SecondDifferences(f, tol, 1.0);
}

ConcavityReport CheckConvex(const ValueField& f, double tol) {
  return SecondDifferences(f, tol, -1.0);
}

}  // namespace asymgame
