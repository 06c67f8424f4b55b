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

#include "dualrail/clifford.h"

#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <sstream>

namespace dualrail {

namespace {

constexpr AxisMap kIdentity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
// x -> x, y -> z, z -> -y
constexpr AxisMap kX90{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};
// x -> y, y -> -x
constexpr AxisMap kZ90{{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}};

AxisMap multiply(const AxisMap& a, const AxisMap& b) {
  AxisMap c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

struct Table {
  std::vector<AxisMap> actions;
  std::map<AxisMap, int> lookup;
  int mul[kCliffordCount][kCliffordCount];
  int inv[kCliffordCount];
  int x90 = -1, z90 = -1, x = -1;

  Table() {
    std::deque<AxisMap> queue{kIdentity};
    lookup[kIdentity] = 0;
    actions.push_back(kIdentity);
    while (!queue.empty()) {
      AxisMap cur = queue.front();
      queue.pop_front();
      for (const AxisMap& g : {kX90, kZ90}) {
        AxisMap next = multiply(g, cur);
        if (lookup.emplace(next, static_cast<int>(actions.size())).second) {
          actions.push_back(next);
          queue.push_back(next);
        }
      }
    }
    if (actions.size() != kCliffordCount) throw std::logic_error("clifford table has wrong order");
    for (int a = 0; a < kCliffordCount; ++a) {
      for (int b = 0; b < kCliffordCount; ++b) {
        int c = lookup.at(multiply(actions[a], actions[b]));
        mul[a][b] = c;
        if (c == 0) inv[a] = b;
      }
    }
    x90 = lookup.at(kX90);
    z90 = lookup.at(kZ90);
    x = lookup.at(multiply(kX90, kX90));
  }
};

const Table& table() {
  static const Table t;
  return t;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2 * std::numbers::pi);
  if (a < 0) a += 2 * std::numbers::pi;
  return a;
}

}  // namespace

const AxisMap& CliffordElement::action() const { return table().actions.at(index); }

Bloch CliffordElement::apply(const Bloch& v) const {
  const AxisMap& m = action();
  Bloch out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return out;
}

CliffordElement clifford_identity() { return {0}; }
CliffordElement clifford_x90() { return {table().x90}; }
CliffordElement clifford_z90() { return {table().z90}; }
CliffordElement clifford_x() { return {table().x}; }

CliffordElement clifford_at(int index) {
  if (index < 0 || index >= kCliffordCount) throw ValidationError("clifford index out of range");
  return {index};
}

CliffordElement compose(CliffordElement a, CliffordElement b) { return {table().mul[a.index][b.index]}; }

CliffordElement inverse(CliffordElement e) { return {table().inv[e.index]}; }

CliffordElement clifford_from_action(const AxisMap& m) {
  auto it = table().lookup.find(m);
  if (it == table().lookup.end()) throw ValidationError("axis map is not a Clifford rotation");
  return {it->second};
}

X90VzDecomposition decompose_x90_vz(CliffordElement e) {
  const CliffordElement z = clifford_z90(), x90 = clifford_x90();
  auto zpow = [&](int k) {
    CliffordElement r = clifford_identity();
    for (int i = 0; i < k; ++i) r = compose(z, r);
    return r;
  };
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int g = 0; g < 4; ++g) {
        CliffordElement r = compose(zpow(g), compose(x90, compose(zpow(b), compose(x90, zpow(a)))));
        if (r == e) {
          const double q = std::numbers::pi / 2;
          return {wrap_angle(a * q), wrap_angle(b * q), wrap_angle(g * q), 2};
        }
      }
    }
  }
  throw std::logic_error("no X90/virtual-Z decomposition found");
}

CliffordElement RBSequence::net() const {
  CliffordElement acc = clifford_identity();
  for (const auto& c : elements) {
    acc = compose(c, acc);
    if (interleaved) acc = compose(clifford_x(), acc);
  }
  return compose(recovery, acc);
}

std::string RBSequence::to_line() const {
  std::ostringstream out;
  out << "m=" << length_m << " interleaved=" << (interleaved ? 1 : 0) << " elements=";
  for (size_t i = 0; i < elements.size(); ++i) out << (i ? "," : "") << elements[i].index;
  out << " recovery=" << recovery.index << " checks=";
  for (size_t i = 0; i < check_positions.size(); ++i) out << (i ? "," : "") << check_positions[i];
  return out.str();
}

RBSequence RBSequence::from_line(const std::string& line) {
  RBSequence s;
  std::istringstream in(line);
  std::string tok;
  bool seen_m = false, seen_rec = false;
  auto ints = [](const std::string& csv) {
    std::vector<int> v;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) v.push_back(std::stoi(item));
    }
    return v;
  };
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ValidationError("sequence line: malformed token '" + tok + "'");
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "m") {
        s.length_m = std::stoi(val);
        seen_m = true;
      } else if (key == "interleaved") {
        s.interleaved = std::stoi(val) != 0;
      } else if (key == "elements") {
        for (int i : ints(val)) s.elements.push_back(clifford_at(i));
      } else if (key == "recovery") {
        s.recovery = clifford_at(std::stoi(val));
        seen_rec = true;
      } else if (key == "checks") {
        s.check_positions = ints(val);
      } else {
        throw ValidationError("sequence line: unknown key '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ValidationError*>(&e)) throw;
      throw ValidationError("sequence line: bad value for '" + key + "'");
    }
  }
  if (!seen_m || !seen_rec) throw ValidationError("sequence line: missing m or recovery");
  if (static_cast<int>(s.elements.size()) != s.length_m) {
    throw ValidationError("sequence line: element count does not match m");
  }
  return s;
}

RBSequence generate_sequence(int m, uint64_t rng_seed, bool interleave, int check_every) {
  if (m < 1) throw ValidationError("m: sequence length must be at least 1");
  if (check_every < 1) throw ValidationError("check_every: must be at least 1");
  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> pick(0, kCliffordCount - 1);
  RBSequence s;
  s.length_m = m;
  s.interleaved = interleave;
  s.elements.reserve(m);
  for (int i = 0; i < m; ++i) {
    s.elements.push_back({pick(rng)});
    if ((i + 1) % check_every == 0) s.check_positions.push_back(i);
  }
  s.recovery = clifford_identity();
  s.recovery = inverse(s.net());
  return s;
}

}  // namespace dualrail
