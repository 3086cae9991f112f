// Thin row-major wrappers over BLAS/LAPACK plus a few small-matrix helpers.
// Everything here is deterministic for a fixed input.
#pragma once

#include <complex>
#include <vector>

namespace quench::la {

using cd = std::complex<double>;

// C(m,n) = opA(A) * opB(B), row-major.  op: 'N', 'T' (transpose), 'C' (conj-transpose).
void matmul(const cd* a, const cd* b, cd* c, long m, long k, long n,
            char op_a = 'N', char op_b = 'N');

struct SvdFactors {
  std::vector<cd> u;    // m x k row-major
  std::vector<double> s;
  std::vector<cd> vh;   // k x n row-major
  long m = 0, n = 0, k = 0;
};

// Thin SVD of a row-major m x n matrix (zgesdd, zgesvd fallback).
SvdFactors svd(const cd* a, long m, long n);

// Eigendecomposition of a Hermitian row-major n x n matrix.
// On return eigvecs[i*n+j] = component j of eigenvector i (ascending eigenvalues).
void eigh(const cd* a, long n, std::vector<double>& evals, std::vector<cd>& evecs);

// Eigenvalues of a real symmetric tridiagonal matrix; optionally eigenvectors
// (row-major, row i = eigenvector i).
void eigh_tridiag(std::vector<double>& diag, std::vector<double>& offdiag,
                  std::vector<double>* evecs_rows);

// exp(scale * H) for Hermitian H (row-major n x n), via eigh.
std::vector<cd> expm_hermitian(const cd* h, long n, cd scale);

// exp(A) for a general small matrix (scaling and squaring), row-major.
std::vector<cd> expm_general(const cd* a, long n);

// Thin QR of a row-major m x n matrix (m >= n or not): A = Q R with Q m x k
// isometric columns, R k x n upper; k = min(m, n).
void qr(const cd* a, long m, long n, std::vector<cd>& q, std::vector<cd>& r);

// Thin LQ: A = L Q with Q k x n isometric rows, L m x k lower; k = min(m, n).
void lq(const cd* a, long m, long n, std::vector<cd>& l, std::vector<cd>& q);

}  // namespace quench::la
