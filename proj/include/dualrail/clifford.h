// Copyright 2026 The dualrail Authors
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

#ifndef DUALRAIL_CLIFFORD_H
#define DUALRAIL_CLIFFORD_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dualrail/core.h"

namespace dualrail {

inline constexpr int kCliffordCount = 24;

/// 3x3 signed permutation matrix acting on Bloch vectors (column-major use:
/// out[i] = sum_j m[i][j] * in[j]).
using AxisMap = std::array<std::array<int, 3>, 3>;

/// Element of the single-qubit Clifford group, identified by its index in the
/// canonical table. Index 0 is the identity.
struct CliffordElement {
  int index = 0;

  const AxisMap& action() const;
  Bloch apply(const Bloch& v) const;
  bool operator==(const CliffordElement&) const = default;
};

CliffordElement clifford_identity();
CliffordElement clifford_x90();
CliffordElement clifford_z90();
CliffordElement clifford_x();

/// Throws ValidationError for out-of-range indices.
CliffordElement clifford_at(int index);

/// a after b: apply b first, then a.
CliffordElement compose(CliffordElement a, CliffordElement b);
CliffordElement inverse(CliffordElement e);

/// Element with the given axis action; throws if the matrix is not in the group.
CliffordElement clifford_from_action(const AxisMap& m);

/// Z(gamma) X90 Z(beta) X90 Z(alpha), applied right to left.
struct X90VzDecomposition {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  int x90_count = 2;
};

X90VzDecomposition decompose_x90_vz(CliffordElement e);

struct RBSequence {
  int length_m = 0;
  std::vector<CliffordElement> elements;
  CliffordElement recovery;
  bool interleaved = false;
  /// Clifford indices (0-based) after which a common check is placed.
  std::vector<int> check_positions;

  /// Net Pauli-frame action of the sequence including recovery and echo X pulses.
  CliffordElement net() const;
  std::string to_line() const;
  static RBSequence from_line(const std::string& line);
};

/// m uniformly random Cliffords with a recovery gate. When `interleave` is
/// set an echo X follows every Clifford (the interleaved check) and is folded
/// into the recovery.
RBSequence generate_sequence(int m, uint64_t rng_seed, bool interleave, int check_every = 5);

}  // namespace dualrail

#endif  // DUALRAIL_CLIFFORD_H
