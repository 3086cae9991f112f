// Dense complex tensors with truncated SVD; the numerical substrate for the
// MPS engine and the exact-diagonalization reference.
//
// Linearization convention (shared by every module): data is row-major over
// the declared axis order, i.e. the last axis varies fastest.
#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace quench {

using cd = std::complex<double>;

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<long> shape);
  Tensor(std::vector<long> shape, std::vector<cd> data);

  const std::vector<long>& shape() const { return shape_; }
  long rank() const { return (long)shape_.size(); }
  long size() const { return (long)data_.size(); }
  long dim(int axis) const { return shape_[axis]; }

  cd* data() { return data_.data(); }
  const cd* data() const { return data_.data(); }
  std::vector<cd>& storage() { return data_; }
  const std::vector<cd>& storage() const { return data_; }

  cd& at(std::initializer_list<long> idx);
  cd at(std::initializer_list<long> idx) const;

  bool finite() const;

 private:
  std::vector<long> shape_;
  std::vector<cd> data_;
};

// Pairwise contraction: result axes are the free axes of a (in order) followed
// by the free axes of b.  paired_axes lists (axis of a, axis of b).
Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<int, int>>& paired_axes);

// Result axis k is input axis order[k].
Tensor permute(const Tensor& a, const std::vector<int>& order);

Tensor reshape(Tensor a, std::vector<long> shape);
Tensor conj(const Tensor& a);
double frob_norm(const Tensor& a);

struct SvdResult {
  Tensor left;                         // m x k isometry
  std::vector<double> singular_values; // descending, >= 0
  Tensor right;                        // k x n isometry (rows)
  double discarded_weight = 0;         // sum of dropped s^2 over sum of all s^2
};

// Truncated SVD of a rank-2 tensor: keeps at most max_rank singular values and
// additionally drops a maximal trailing set whose cumulative squared weight is
// at most cutoff (relative to the total squared weight).  At least one value is
// always kept; exact zeros are always dropped (they carry no weight).
SvdResult svd_truncate(const Tensor& m, long max_rank, double cutoff);

}  // namespace quench
