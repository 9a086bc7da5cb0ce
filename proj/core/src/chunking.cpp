// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/chunking.hpp"

#include "rlse/error.hpp"

namespace rlse {

ChunkSequence make_chunks(const Eigen::MatrixXd& mps, int p) {
  if (p < 1) throw DataError("make_chunks: p must be >= 1, got " + std::to_string(p));
  const int frames = static_cast<int>(mps.rows());
  const int n_mels = static_cast<int>(mps.cols());
  if (frames == 0 || n_mels == 0) throw DataError("make_chunks: empty spectrogram");

  ChunkSequence cs;
  cs.p = p;
  cs.n_mels = n_mels;
  const int count = (frames + p - 1) / p;
  cs.chunks.reserve(static_cast<size_t>(count));
  for (int c = 0; c < count; ++c) {
    Eigen::VectorXd chunk(p * n_mels);
    for (int j = 0; j < p; ++j) {
      int frame = c * p + j;
      if (frame >= frames) frame = frames - 1;  // repeat the last frame
      chunk.segment(j * n_mels, n_mels) = mps.row(frame).transpose();
    }
    cs.chunks.push_back(std::move(chunk));
  }
  return cs;
}

std::vector<Eigen::VectorXd> make_context(const ChunkSequence& cs, int context_chunks) {
  if (context_chunks < 1) {
    throw DataError("make_context: context size must be >= 1, got " +
                    std::to_string(context_chunks));
  }
  if (cs.chunks.empty()) throw DataError("make_context: empty chunk sequence");

  const int dim = cs.dim();
  std::vector<Eigen::VectorXd> out;
  out.reserve(cs.chunks.size());
  for (int c = 0; c < cs.count(); ++c) {
    Eigen::VectorXd ctx(context_chunks * dim);
    for (int j = 0; j < context_chunks; ++j) {
      int idx = c - context_chunks + 1 + j;
      if (idx < 0) idx = 0;  // repeat the first chunk at the leading boundary
      ctx.segment(j * dim, dim) = cs.chunks[static_cast<size_t>(idx)];
    }
    out.push_back(std::move(ctx));
  }
  return out;
}

Eigen::MatrixXd flatten_chunks(const ChunkSequence& cs) {
  if (cs.chunks.empty()) throw DataError("flatten_chunks: empty chunk sequence");
  Eigen::MatrixXd mps(cs.count() * cs.p, cs.n_mels);
  for (int c = 0; c < cs.count(); ++c) {
    for (int j = 0; j < cs.p; ++j) {
      mps.row(c * cs.p + j) = cs.chunks[static_cast<size_t>(c)].segment(j * cs.n_mels, cs.n_mels).transpose();
    }
  }
  return mps;
}

}  // namespace rlse
