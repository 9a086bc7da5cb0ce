// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/codebook.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rlse/rng.hpp"

namespace rlse {

namespace {

// Seeded init preferring distinct vectors; falls back to duplicates only
// when the sample set has fewer distinct vectors than clusters.
std::vector<BitVector> init_centroids(const std::vector<IbmVector>& samples, int cluster_count,
                                      Rng& rng) {
  const std::vector<size_t> order =
      rng.sample_without_replacement(samples.size(), samples.size());
  std::vector<BitVector> centroids;
  centroids.reserve(static_cast<size_t>(cluster_count));
  for (const size_t idx : order) {
    if (centroids.size() == static_cast<size_t>(cluster_count)) break;
    const auto& cand = samples[idx];
    if (std::find(centroids.begin(), centroids.end(), cand) == centroids.end()) {
      centroids.push_back(cand);
    }
  }
  for (size_t i = 0; centroids.size() < static_cast<size_t>(cluster_count); ++i) {
    centroids.push_back(samples[order[i % order.size()]]);
  }
  return centroids;
}

}  // namespace

BitVector majority_vote(const std::vector<const IbmVector*>& members) {
  if (members.empty()) throw DataError("majority_vote: no members");
  const size_t dim = members.front()->size();
  std::vector<size_t> ones(dim, 0);
  for (const auto* m : members) {
    if (m->size() != dim) throw DataError("majority_vote: mixed dimensions");
    for (size_t j = 0; j < dim; ++j) {
      if (m->get(j)) ++ones[j];
    }
  }
  BitVector c(dim);
  for (size_t j = 0; j < dim; ++j) {
    if (2 * ones[j] >= members.size()) c.set(j, true);
  }
  return c;
}

int nearest_cluster(const BitVector& v, const Codebook& cb) {
  if (cb.centroids.empty()) throw DataError("nearest_cluster: empty codebook");
  int best = 0;
  size_t best_d = hamming_distance(v, cb.centroids[0]);
  for (int a = 1; a < cb.size(); ++a) {
    const size_t d = hamming_distance(v, cb.centroids[static_cast<size_t>(a)]);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

const BitVector& select_mask(const Codebook& cb, int a) {
  if (a < 0 || a >= cb.size()) {
    throw DataError("select_mask: index " + std::to_string(a) + " out of range [0, " +
                    std::to_string(cb.size()) + ")");
  }
  return cb.centroids[static_cast<size_t>(a)];
}

KmeansResult kmeans_binary(const std::vector<IbmVector>& samples, int cluster_count,
                           uint64_t seed, int max_iter) {
  if (cluster_count < 2) {
    throw DataError("kmeans_binary: need at least 2 clusters, got " +
                    std::to_string(cluster_count));
  }
  if (samples.size() < static_cast<size_t>(cluster_count)) {
    throw DataError("kmeans_binary: " + std::to_string(samples.size()) + " samples for " +
                    std::to_string(cluster_count) + " clusters");
  }
  const size_t dim = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != dim) throw DataError("kmeans_binary: samples have mixed dimensions");
  }

  Rng rng(seed);
  KmeansResult res;
  res.codebook.seed = seed;
  std::vector<BitVector> centroids = init_centroids(samples, cluster_count, rng);

  std::vector<int> assignment(samples.size(), -1);
  std::vector<size_t> assigned_dist(samples.size(), 0);
  std::vector<int> members(static_cast<size_t>(cluster_count), 0);
  Codebook scratch;

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // Assignment step.
    scratch.centroids = centroids;
    std::fill(members.begin(), members.end(), 0);
    std::vector<int> next(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      next[i] = nearest_cluster(samples[i], scratch);
      assigned_dist[i] = hamming_distance(samples[i], centroids[static_cast<size_t>(next[i])]);
      ++members[static_cast<size_t>(next[i])];
    }

    // Re-seed empty clusters from the globally worst-fit sample.
    for (int a = 0; a < cluster_count; ++a) {
      if (members[static_cast<size_t>(a)] > 0) continue;
      size_t worst = 0;
      bool found = false;
      for (size_t i = 0; i < samples.size(); ++i) {
        if (members[static_cast<size_t>(next[i])] <= 1) continue;  // do not empty another cluster
        if (!found || assigned_dist[i] > assigned_dist[worst]) {
          worst = i;
          found = true;
        }
      }
      if (!found) continue;  // every remaining cluster is a singleton
      --members[static_cast<size_t>(next[worst])];
      next[worst] = a;
      members[static_cast<size_t>(a)] = 1;
      centroids[static_cast<size_t>(a)] = samples[worst];
      assigned_dist[worst] = 0;
    }

    uint64_t objective = 0;
    for (size_t i = 0; i < samples.size(); ++i) objective += assigned_dist[i];
    if (!res.objective_history.empty() && objective > res.objective_history.back()) {
      throw Error("kmeans_binary: objective increased from " +
                  std::to_string(res.objective_history.back()) + " to " +
                  std::to_string(objective));
    }
    res.objective_history.push_back(objective);

    const bool converged = (next == assignment);
    assignment = std::move(next);
    if (converged) break;

    // Update step.
    std::vector<std::vector<const IbmVector*>> cluster_members(
        static_cast<size_t>(cluster_count));
    for (size_t i = 0; i < samples.size(); ++i) {
      cluster_members[static_cast<size_t>(assignment[i])].push_back(&samples[i]);
    }
    for (int a = 0; a < cluster_count; ++a) {
      if (cluster_members[static_cast<size_t>(a)].empty()) continue;  // keep the old centroid
      centroids[static_cast<size_t>(a)] = majority_vote(cluster_members[static_cast<size_t>(a)]);
    }
  }

  res.codebook.centroids = std::move(centroids);
  res.codebook.iterations = static_cast<int>(res.objective_history.size());
  res.assignment = std::move(assignment);
  return res;
}

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write codebook: " + path.string());
  out << "RLSECB v1\n";
  out << "dim=" << cb.dim() << " clusters=" << cb.size() << " seed=" << cb.seed
      << " iterations=" << cb.iterations << "\n";
  for (const auto& c : cb.centroids) {
    for (size_t j = 0; j < c.size(); ++j) out << (c.get(j) ? '1' : '0');
    out << "\n";
  }
  if (!out) throw DataError("short write to codebook: " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open codebook: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "RLSECB v1") {
    throw DataError("bad codebook header in " + path.string());
  }
  if (!std::getline(in, line)) throw DataError("truncated codebook: " + path.string());

  int dim = -1, clusters = -1, iterations = 0;
  uint64_t seed = 0;
  {
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw DataError("bad codebook field: " + tok);
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "dim") {
        dim = std::stoi(val);
      } else if (key == "clusters") {
        clusters = std::stoi(val);
      } else if (key == "seed") {
        seed = std::stoull(val);
      } else if (key == "iterations") {
        iterations = std::stoi(val);
      }
    }
  }
  if (dim < 1 || clusters < 2) throw DataError("bad codebook dimensions in " + path.string());

  Codebook cb;
  cb.seed = seed;
  cb.iterations = iterations;
  cb.centroids.reserve(static_cast<size_t>(clusters));
  for (int a = 0; a < clusters; ++a) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != dim) {
      throw DataError("truncated codebook row " + std::to_string(a) + " in " + path.string());
    }
    BitVector c(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      if (line[static_cast<size_t>(j)] == '1') {
        c.set(static_cast<size_t>(j), true);
      } else if (line[static_cast<size_t>(j)] != '0') {
        throw DataError("bad codebook bit in " + path.string());
      }
    }
    cb.centroids.push_back(std::move(c));
  }
  return cb;
}

}  // namespace rlse
