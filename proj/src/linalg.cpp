#include "quench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <cblas.h>
#include <lapacke.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace quench::la {

namespace {
CBLAS_TRANSPOSE to_cblas(char op) {
  switch (op) {
    case 'N': return CblasNoTrans;
    case 'T': return CblasTrans;
    case 'C': return CblasConjTrans;
  }
  throw std::invalid_argument("bad matmul op");
}
}  // namespace

void matmul(const cd* a, const cd* b, cd* c, long m, long k, long n, char op_a, char op_b) {
  const cd one(1, 0), zero(0, 0);
  const long lda = (op_a == 'N') ? k : m;
  const long ldb = (op_b == 'N') ? n : k;
  cblas_zgemm(CblasRowMajor, to_cblas(op_a), to_cblas(op_b), (int)m, (int)n, (int)k,
              &one, a, (int)lda, b, (int)ldb, &zero, c, (int)n);
}

// Row-major SVD through the column-major LAPACK call on the transposed view:
// the buffer of A (row-major m x n) is A^T in column-major (n x m).  With
// A^T = P S Q^H one has A = conj(Q) S P^T, so LAPACK's VT buffer reinterpreted
// row-major (m x k) is exactly U, and the U buffer reinterpreted (k x n) is V^H.
SvdFactors svd(const cd* a, long m, long n) {
  SvdFactors f;
  f.m = m;
  f.n = n;
  f.k = std::min(m, n);
  std::vector<cd> work(a, a + size_t(m) * n);
  f.s.resize(f.k);
  std::vector<cd> p(size_t(n) * f.k);   // LAPACK U, col-major n x k
  std::vector<cd> qh(size_t(f.k) * m);  // LAPACK VT, col-major k x m
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', (int)n, (int)m, work.data(), (int)n,
                            f.s.data(), p.data(), (int)n, qh.data(), (int)f.k);
  if (info != 0) {
    // zgesdd occasionally fails to converge; zgesvd is slower but sturdier.
    work.assign(a, a + size_t(m) * n);
    std::vector<double> superb(f.k);
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', (int)n, (int)m, work.data(), (int)n,
                          f.s.data(), p.data(), (int)n, qh.data(), (int)f.k, superb.data());
    if (info != 0) throw std::runtime_error("svd failed to converge");
  }
  f.u = std::move(qh);  // row-major m x k
  f.vh = std::move(p);  // row-major k x n
  return f;
}

// Row-major Hermitian eigendecomposition.  The column-major view of the buffer
// is conj(H), whose eigenvectors are the conjugates of those of H; LAPACK's
// col-major eigenvector columns land in rows of the row-major view, so row i of
// the returned buffer is eigenvector i without further fixes.
void eigh(const cd* a, long n, std::vector<double>& evals, std::vector<cd>& evecs) {
  evecs.assign(a, a + size_t(n) * n);
  evals.resize(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', (int)n, evecs.data(), (int)n, evals.data());
  if (info != 0) throw std::runtime_error("zheevd failed");
  for (auto& z : evecs) z = std::conj(z);
}

void eigh_tridiag(std::vector<double>& diag, std::vector<double>& offdiag,
                  std::vector<double>* evecs_rows) {
  const int n = (int)diag.size();
  if (evecs_rows) {
    evecs_rows->assign(size_t(n) * n, 0.0);
    int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, diag.data(), offdiag.data(),
                             evecs_rows->data(), n);
    if (info != 0) throw std::runtime_error("dstev failed");
    // col-major columns == row-major rows; real so nothing else to do
  } else {
    int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, diag.data(), offdiag.data(), nullptr, n);
    if (info != 0) throw std::runtime_error("dstev failed");
  }
}

std::vector<cd> expm_hermitian(const cd* h, long n, cd scale) {
  std::vector<double> w;
  std::vector<cd> v;  // rows are eigenvectors
  eigh(h, n, w, v);
  // exp[a][b] = sum_i e^{s w_i} v_i[a] conj(v_i[b])
  std::vector<cd> scaled(size_t(n) * n);
  for (long i = 0; i < n; i++) {
    const cd phase = std::exp(scale * w[i]);
    for (long j = 0; j < n; j++) scaled[size_t(i) * n + j] = phase * std::conj(v[size_t(i) * n + j]);
  }
  std::vector<cd> out(size_t(n) * n);
  matmul(v.data(), scaled.data(), out.data(), n, n, n, 'T', 'N');
  return out;
}

std::vector<cd> expm_general(const cd* a, long n) {
  using Mat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> m(a, n, n);
  Mat e = m.exp();
  return std::vector<cd>(e.data(), e.data() + size_t(n) * n);
}

// Row-major QR == column-major LQ on the transposed view (see svd comment).
void qr(const cd* a, long m, long n, std::vector<cd>& q, std::vector<cd>& r) {
  const long k = std::min(m, n);
  std::vector<cd> work(a, a + size_t(m) * n);  // col-major n x m
  std::vector<cd> tau(k);
  int info = LAPACKE_zgelqf(LAPACK_COL_MAJOR, (int)n, (int)m, work.data(), (int)n, tau.data());
  if (info != 0) throw std::runtime_error("zgelqf failed");
  // L is the lower-triangular n x k part (col-major) -> row-major R = L^T (k x n upper)
  r.assign(size_t(k) * n, cd(0, 0));
  for (long j = 0; j < k; j++)        // col-major column j of L
    for (long i = j; i < n; i++)      // rows j..n-1
      r[size_t(j) * n + i] = work[size_t(j) * n + i];  // R[j][i] = L[i][j] stored at i + j*n
  int info2 = LAPACKE_zunglq(LAPACK_COL_MAJOR, (int)k, (int)m, (int)k, work.data(), (int)n, tau.data());
  if (info2 != 0) throw std::runtime_error("zunglq failed");
  // work now holds Q' (k x m, col-major, ld n); row-major Q = Q'^T (m x k)
  q.resize(size_t(m) * k);
  for (long j = 0; j < m; j++)
    for (long i = 0; i < k; i++) q[size_t(j) * k + i] = work[size_t(j) * n + i];
}

// Row-major LQ == column-major QR on the transposed view.
void lq(const cd* a, long m, long n, std::vector<cd>& l, std::vector<cd>& q) {
  const long k = std::min(m, n);
  std::vector<cd> work(a, a + size_t(m) * n);  // col-major n x m
  std::vector<cd> tau(k);
  int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, (int)n, (int)m, work.data(), (int)n, tau.data());
  if (info != 0) throw std::runtime_error("zgeqrf failed");
  // col-major R (k x m upper) -> row-major L = R^T (m x k lower)
  l.assign(size_t(m) * k, cd(0, 0));
  for (long j = 0; j < m; j++)
    for (long i = 0; i <= std::min<long>(j, k - 1); i++)
      l[size_t(j) * k + i] = work[size_t(j) * n + i];
  int info2 = LAPACKE_zungqr(LAPACK_COL_MAJOR, (int)n, (int)k, (int)k, work.data(), (int)n, tau.data());
  if (info2 != 0) throw std::runtime_error("zungqr failed");
  // work holds Q'' (n x k col-major, ld n); row-major Q = Q''^T (k x n)
  q.resize(size_t(k) * n);
  for (long j = 0; j < k; j++)
    for (long i = 0; i < n; i++) q[size_t(j) * n + i] = work[size_t(j) * n + i];
}

}  // namespace quench::la
