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


#ifndef ASYMGAME_ENVELOPE_H_
#define ASYMGAME_ENVELOPE_H_

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "asymgame/game_model.h"

namespace asymgame {

class EnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Regular grid { k/m : k in N^d, sum k = m } on the simplex of dimension
// d = |S| in {1, 2, 3}.
//
// Point ordering (also used by the abstract-u input format):
//   d = 1: the single point.
//   d = 2: index i is the belief (i/m, 1 - i/m), i = 0..m.
//   d = 3: (i, j) with i + j <= m is the belief (i/m, j/m, (m-i-j)/m), stored
//          row by row in i, so index = sum_{i' < i} (m - i' + 1) + j.
// For d = 3, cells are split along the anti-diagonal (Freudenthal
// triangulation), which makes interpolation piecewise linear and exact at
// grid points.
class BeliefGrid {
 public:
  BeliefGrid() = default;
  BeliefGrid(int dim, int resolution);

  static long long CountPoints(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return m_; }
  int size() const { return size_; }

  Belief Point(int index) const;
  // Lattice coordinates: (i) for d = 2, (i, j) for d = 3; unused entries 0.
  std::array<int, 2> Coords(int index) const;
  // -1 if the coordinates fall outside the simplex.
  int Index(int i, int j = 0) const;
  bool Contains(int i, int j = 0) const;

  // Interpolation stencil at p: up to three (index, weight) pairs.
  struct Stencil {
    int count = 0;
    std::array<int, 3> index{};
    std::array<double, 3> weight{};
  };
  Stencil Locate(const Belief& p) const;

 private:
  int dim_ = 0;
  int m_ = 0;
  int size_ = 0;
};

// A function on a BeliefGrid, evaluated off-grid by piecewise-linear
// interpolation.
struct ValueField {
  BeliefGrid grid;
  std::vector<double> values;

  ValueField() = default;
  ValueField(BeliefGrid g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double operator()(const Belief& p) const;
  double At(int index) const { return values[index]; }
  double SupDistance(const ValueField& other) const;
};

ValueField SampleField(const BeliefGrid& grid,
                       const std::function<double(const Belief&)>& f);

// Smallest concave majorant of uniformly spaced samples (upper hull).
std::vector<double> ConcaveMajorant1D(const std::vector<double>& values);
std::vector<double> ConvexMinorant1D(const std::vector<double>& values);

struct EnvelopeOptions {
  double sweep_tolerance = 1e-12;
  int max_sweeps = 10000;
};

// cav f on the grid. Exact upper hull for d <= 2; for d = 3, repeated 1D hull
// sweeps along a fixed set of lattice directions until no value rises by more
// than the tolerance. Throws EnvelopeError if sweeps do not settle.
ValueField Cav(const ValueField& f, const EnvelopeOptions& options = {});
ValueField Vex(const ValueField& f, const EnvelopeOptions& options = {});

struct ConcavityReport {
  bool concave = true;
  double worst = 0.0;     // largest second difference found
  int worst_index = -1;   // grid point where it occurs
};

// Second differences along every lattice direction used by Cav.
ConcavityReport CheckConcave(const ValueField& f, double tol);
ConcavityReport CheckConvex(const ValueField& f, double tol);

// Lattice directions (di, dj) used by the d = 3 sweeps.
const std::vector<std::array<int, 2>>& SweepDirections();

}  // namespace asymgame

#endif  // ASYMGAME_ENVELOPE_H_
