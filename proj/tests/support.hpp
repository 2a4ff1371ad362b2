// SPDX-License-Identifier: Apache-2.0

// Independent oracles shared by the unit, property and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "eigenfracture/geometry.hpp"
#include "eigenfracture/mesh.hpp"

namespace eftest {

/// All-pairs neighborhood: every simplex whose distance to some crack
/// simplex is at most eps, using simplex_distance on triangle coordinates.
inline std::vector<int> brute_neighborhood(const ef::TriangulationMesh& mesh, const std::vector<int>& crack,
                                           double eps) {
  std::vector<int> out;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    const auto ts = mesh.triangle(s);
    for (int c : crack) {
      if (ef::simplex_distance(ts, mesh.triangle(c)) <= eps + ef::kDistanceTieTol) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

inline double area_of(const ef::TriangulationMesh& mesh, const std::vector<int>& ids, bool reference_only = false) {
  double a = 0.0;
  for (int s : ids)
    if (!reference_only || mesh.label(s) != ef::Region::exterior) a += mesh.area(s);
  return a;
}

/// Flood fill over shared edges found from the vertex lists, seeded from
/// every collar simplex outside the neighborhood.
inline std::vector<int> flood_fill_good_set(const ef::TriangulationMesh& mesh, const std::vector<int>& nbhd) {
  const int ns = static_cast<int>(mesh.num_simplices());
  std::vector<char> blocked(ns, 0);
  for (int s : nbhd) blocked[s] = 1;
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (int s = 0; s < ns; ++s) {
    const auto& v = mesh.simplex(s);
    for (int k = 0; k < 3; ++k) {
      int a = v[k], b = v[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back(s);
    }
  }
  std::vector<std::vector<int>> adj(ns);
  for (const auto& [e, ss] : edges)
    for (int a : ss)
      for (int b : ss)
        if (a != b) adj[a].push_back(b);
  auto usable = [&](int s) { return !blocked[s] && mesh.label(s) != ef::Region::exterior; };
  std::vector<char> seen(ns, 0);
  std::queue<int> q;
  for (int s = 0; s < ns; ++s)
    if (usable(s) && mesh.label(s) == ef::Region::collar) {
      seen[s] = 1;
      q.push(s);
    }
  while (!q.empty()) {
    const int s = q.front();
    q.pop();
    for (int n : adj[s])
      if (!seen[n] && usable(n)) {
        seen[n] = 1;
        q.push(n);
      }
  }
  std::vector<int> out;
  for (int s = 0; s < ns; ++s)
    if (seen[s]) out.push_back(s);
  return out;
}

inline std::vector<int> interior_simplices(const ef::TriangulationMesh& mesh) {
  std::vector<int> out;
  for (int s = 0; s < static_cast<int>(mesh.num_simplices()); ++s)
    if (mesh.label(s) == ef::Region::interior) out.push_back(s);
  return out;
}

/// Random subset of the interior simplices with k elements, sorted.
inline std::vector<int> random_interior_set(const ef::TriangulationMesh& mesh, std::size_t k, std::mt19937_64& rng) {
  auto pool = interior_simplices(mesh);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(k, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace eftest
