#pragma once

#include "trisac/common.hpp"

namespace trisac {

/// Stacked-vector layout: a length n*count vector is `count` contiguous
/// blocks of length `n`, block j holding column j of the matrix it flattens
/// (column-major vec). Precoder stacks put the common stream in block 0 and
/// private stream k in block k; device-link stacks put receiver m in block
/// m-1.
struct stack_layout {
  int block_len = 0;    // n: antenna elements per block
  int block_count = 0;  // number of stacked columns

  int size() const { return block_len * block_count; }
  int offset(int block) const { return block * block_len; }
};

/// Binary selector kinds over stacked vectors.
///  stream     - all entries of one stream block of a precoder stack
///               (index 0 = common stream, 1..K = private streams)
///  due        - all entries of one receiver block of a link stack (1..M)
///  element_w  - one antenna element across every stream block (1..n)
///  element_f  - one antenna element across every receiver block (1..n)
///  due_lead   - single entry: first element of receiver block m (1..M)
enum class mask_kind { stream, due, element_w, element_f, due_lead };

inline int common_stream = 0;

struct index_vector {
  mask_kind kind;
  int index;
  rvec v;

  int size() const { return static_cast<int>(v.size()); }
};

/// Builds the binary selector `kind` with the given 1-based index (stream
/// masks accept 0 for the common stream). `n` is the per-block length and
/// `count` the number of private streams (stream/element_w kinds, giving
/// count+1 blocks) or receivers (due/element_f/due_lead kinds).
inline index_vector make_mask(mask_kind kind, int index, int n, int count) {
  if (n < 1 || count < 1) throw std::out_of_range("make_mask: n and count must be >= 1");
  auto check = [&](int lo, int hi) {
    if (index < lo || index > hi) throw std::out_of_range("make_mask: index out of range");
  };
  index_vector iv{kind, index, {}};
  switch (kind) {
    case mask_kind::stream: {
      check(0, count);
      iv.v = rvec::Zero(n * (count + 1));
      iv.v.segment(index * n, n).setOnes();
      break;
    }
    case mask_kind::due: {
      check(1, count);
      iv.v = rvec::Zero(n * count);
      iv.v.segment((index - 1) * n, n).setOnes();
      break;
    }
    case mask_kind::element_w: {
      check(1, n);
      iv.v = rvec::Zero(n * (count + 1));
      for (int b = 0; b < count + 1; ++b) iv.v(b * n + index - 1) = 1.0;
      break;
    }
    case mask_kind::element_f: {
      check(1, n);
      iv.v = rvec::Zero(n * count);
      for (int b = 0; b < count; ++b) iv.v(b * n + index - 1) = 1.0;
      break;
    }
    case mask_kind::due_lead: {
      check(1, count);
      iv.v = rvec::Zero(n * count);
      iv.v((index - 1) * n) = 1.0;
      break;
    }
  }
  return iv;
}

/// Column-major flattening of a complex matrix.
inline cvec vec_of(const cmat& x) {
  return Eigen::Map<const cvec>(x.data(), x.size());
}

inline cmat unvec(const cvec& v, int rows, int cols) {
  require(v.size() == static_cast<Eigen::Index>(rows) * cols, "unvec: size mismatch");
  return Eigen::Map<const cmat>(v.data(), rows, cols);
}

/// vec(a .* x) for same-shape matrices; identical (to the bit) with
/// diag(vec(a)) * vec(x) since both reduce to an entrywise product.
inline cvec vec_hadamard(const cmat& a, const cmat& x) {
  require(a.rows() == x.rows() && a.cols() == x.cols(), "vec_hadamard: shape mismatch");
  return vec_of(a).cwiseProduct(vec_of(x));
}

/// Stacks `copies` repetitions of a channel vector: the receive channel seen
/// against every stream block of a precoder stack.
template <typename Vec>
Vec repeat_channel(const Vec& v, int copies) {
  require(copies >= 1, "repeat_channel: copies must be >= 1");
  Vec out(v.size() * copies);
  for (int c = 0; c < copies; ++c) out.segment(c * v.size(), v.size()) = v;
  return out;
}

/// Expands per-receiver schedule weights (length M) to a stacked vector of
/// length n*M, constant over each receiver block.
inline rvec expand_schedule(const rvec& rho, int n) {
  require(n >= 1, "expand_schedule: n must be >= 1");
  rvec out(rho.size() * n);
  for (int m = 0; m < rho.size(); ++m) out.segment(m * n, n).setConstant(rho(m));
  return out;
}

/// Concatenates per-receiver blocks (e.g. sensing channels z_{k,1..M,u}) into
/// one stacked vector.
inline cvec stack_blocks(const std::vector<cvec>& blocks) {
  require(!blocks.empty(), "stack_blocks: no blocks");
  const auto n = blocks.front().size();
  cvec out(n * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    require(blocks[m].size() == n, "stack_blocks: ragged blocks");
    out.segment(static_cast<Eigen::Index>(m) * n, n) = blocks[m];
  }
  return out;
}

}  // namespace trisac
