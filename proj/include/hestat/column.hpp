/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hestat/ckks.hpp"
#include "hestat/errors.hpp"

namespace hestat {

/// A dataset column packed into ceil(n/slot_count) ciphertexts. Slots beyond
/// n_valid in the final chunk are zero at encode time; after in-place
/// statistics they may carry garbage, which decode_column truncates away.
struct EncryptedColumn {
  std::vector<Ciphertext> chunks;
  std::size_t n_valid = 0;
  std::string name;
};

inline EncryptedColumn encode_column(EvalContext& ctx,
                                     std::span<const double> values,
                                     std::string name = {}) {
  for (double v : values)
    if (!std::isfinite(v))
      throw non_finite_value("encode_column: non-finite value in " + name);
  EncryptedColumn col;
  col.n_valid = values.size();
  col.name = std::move(name);
  const std::size_t sc = ctx.params().slot_count;
  for (std::size_t off = 0; off < values.size(); off += sc)
    col.chunks.push_back(
        ctx.encrypt(values.subspan(off, std::min(sc, values.size() - off))));
  return col;
}

inline std::vector<double> decode_column(const EvalContext& ctx,
                                         const EncryptedColumn& col) {
  const std::size_t sc = ctx.params().slot_count;
  if (col.n_valid > col.chunks.size() * sc)
    throw length_mismatch("decode_column: n_valid exceeds packed capacity");
  std::vector<double> out;
  out.reserve(col.n_valid);
  std::size_t remaining = col.n_valid;
  for (const Ciphertext& ct : col.chunks) {
    const std::size_t take = std::min(sc, remaining);
    auto part = ctx.decrypt(ct, take);
    out.insert(out.end(), part.begin(), part.end());
    remaining -= take;
  }
  return out;
}

}  // namespace hestat
