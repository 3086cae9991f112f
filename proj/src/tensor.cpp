#include "quench/tensor.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "quench/linalg.hpp"

namespace quench {

namespace {
long shape_size(const std::vector<long>& shape) {
  long n = 1;
  for (long d : shape) {
    if (d < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<long> shape) : shape_(std::move(shape)) {
  data_.assign(shape_size(shape_), cd(0, 0));
}

Tensor::Tensor(std::vector<long> shape, std::vector<cd> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if ((long)data_.size() != shape_size(shape_))
    throw std::invalid_argument("tensor data length does not match shape");
}

cd& Tensor::at(std::initializer_list<long> idx) {
  long off = 0;
  int axis = 0;
  for (long i : idx) off = off * shape_[axis++] + i;
  return data_[off];
}

cd Tensor::at(std::initializer_list<long> idx) const {
  return const_cast<Tensor*>(this)->at(idx);
}

bool Tensor::finite() const {
  for (const cd& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

Tensor permute(const Tensor& a, const std::vector<int>& order) {
  if ((long)order.size() != a.rank()) throw std::invalid_argument("permute: bad order length");
  const auto& shp = a.shape();
  std::vector<long> out_shape(order.size());
  for (size_t k = 0; k < order.size(); k++) out_shape[k] = shp[order[k]];
  Tensor out(out_shape);

  // strides of the input
  std::vector<long> in_stride(shp.size(), 1);
  for (int i = (int)shp.size() - 2; i >= 0; i--) in_stride[i] = in_stride[i + 1] * shp[i + 1];
  // input stride per output axis
  std::vector<long> stride(order.size());
  for (size_t k = 0; k < order.size(); k++) stride[k] = in_stride[order[k]];

  const long n = a.size();
  const int r = (int)order.size();
  std::vector<long> idx(r, 0);
  const cd* src = a.data();
  cd* dst = out.data();
  long off = 0;
  for (long p = 0; p < n; p++) {
    dst[p] = src[off];
    for (int ax = r - 1; ax >= 0; ax--) {
      off += stride[ax];
      if (++idx[ax] < out_shape[ax]) break;
      off -= stride[ax] * out_shape[ax];
      idx[ax] = 0;
    }
  }
  return out;
}

Tensor reshape(Tensor a, std::vector<long> shape) {
  if (shape_size(shape) != a.size()) throw std::invalid_argument("reshape: size mismatch");
  return Tensor(std::move(shape), std::move(a.storage()));
}

Tensor conj(const Tensor& a) {
  Tensor out(a.shape(), a.storage());
  for (cd& z : out.storage()) z = std::conj(z);
  return out;
}

double frob_norm(const Tensor& a) {
  double s = 0;
  for (const cd& z : a.storage()) s += std::norm(z);
  return std::sqrt(s);
}

Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<int, int>>& paired_axes) {
  const int ra = (int)a.rank(), rb = (int)b.rank();
  std::vector<bool> a_paired(ra, false), b_paired(rb, false);
  long contracted = 1;
  for (auto [pa, pb] : paired_axes) {
    if (pa < 0 || pa >= ra || pb < 0 || pb >= rb)
      throw std::invalid_argument("contract: axis out of range");
    if (a_paired[pa] || b_paired[pb]) throw std::invalid_argument("contract: repeated axis");
    if (a.dim(pa) != b.dim(pb))
      throw std::invalid_argument("contract: paired axes have different sizes");
    a_paired[pa] = true;
    b_paired[pb] = true;
    contracted *= a.dim(pa);
  }

  std::vector<int> a_order, b_order;
  std::vector<long> out_shape;
  for (int i = 0; i < ra; i++)
    if (!a_paired[i]) {
      a_order.push_back(i);
      out_shape.push_back(a.dim(i));
    }
  for (auto [pa, pb] : paired_axes) a_order.push_back(pa);
  for (auto [pa, pb] : paired_axes) b_order.push_back(pb);
  for (int i = 0; i < rb; i++)
    if (!b_paired[i]) {
      b_order.push_back(i);
      out_shape.push_back(b.dim(i));
    }

  Tensor ap = permute(a, a_order);
  Tensor bp = permute(b, b_order);
  const long m = a.size() / contracted;
  const long n = b.size() / contracted;

  Tensor out(out_shape.empty() ? std::vector<long>{1} : out_shape);
  la::matmul(ap.data(), bp.data(), out.data(), m, contracted, n);
  if (out_shape.empty()) out = reshape(std::move(out), {1});
  return out;
}

SvdResult svd_truncate(const Tensor& m, long max_rank, double cutoff) {
  if (m.rank() != 2) throw std::invalid_argument("svd_truncate: tensor must have two axes");
  if (max_rank < 1) throw std::invalid_argument("svd_truncate: max_rank must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("svd_truncate: cutoff must be >= 0");
  if (!m.finite()) throw std::invalid_argument("svd_truncate: non-finite entries");

  const long rows = m.dim(0), cols = m.dim(1);
  la::SvdFactors f = la::svd(m.data(), rows, cols);

  double total = 0;
  for (double s : f.s) total += s * s;

  long keep = std::min<long>(max_rank, f.k);
  while (keep > 1 && f.s[keep - 1] == 0.0) keep--;
  if (total > 0) {
    const double budget = cutoff * total;
    double tail = 0;
    for (long i = f.k - 1; i >= keep; i--) tail += f.s[i] * f.s[i];
    while (keep > 1 && tail + f.s[keep - 1] * f.s[keep - 1] <= budget) {
      tail += f.s[keep - 1] * f.s[keep - 1];
      keep--;
    }
  }

  double kept = 0;
  for (long i = 0; i < keep; i++) kept += f.s[i] * f.s[i];

  SvdResult r;
  r.singular_values.assign(f.s.begin(), f.s.begin() + keep);
  r.discarded_weight = total > 0 ? std::max(0.0, (total - kept) / total) : 0.0;

  Tensor left({rows, keep});
  for (long i = 0; i < rows; i++)
    std::memcpy(left.data() + i * keep, f.u.data() + i * f.k, sizeof(cd) * keep);
  Tensor right({keep, cols}, std::vector<cd>(f.vh.begin(), f.vh.begin() + keep * cols));
  r.left = std::move(left);
  r.right = std::move(right);
  return r;
}

}  // namespace quench
