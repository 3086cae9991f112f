#include <doctest.h>

#include <complex>
#include <random>

#include "quench/linalg.hpp"
#include "quench/tensor.hpp"

using namespace quench;

namespace {

Tensor random_tensor(std::vector<long> shape, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Tensor t(std::move(shape));
  for (auto& z : t.storage()) z = cd(nd(gen), nd(gen));
  return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0;
  for (long i = 0; i < a.size(); i++) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Tensor reconstruct(const SvdResult& s) {
  const long k = (long)s.singular_values.size();
  Tensor mid({k, k});
  for (long i = 0; i < k; i++) mid.at({i, i}) = s.singular_values[i];
  return contract(contract(s.left, mid, {{1, 0}}), s.right, {{1, 0}});
}

}  // namespace

TEST_CASE("contract identity with basis vector") {
  Tensor id({2, 2});
  id.at({0, 0}) = 1;
  id.at({1, 1}) = 1;
  Tensor v({2}, {cd(1, 0), cd(0, 0)});
  Tensor out = contract(id, v, {{1, 0}});
  CHECK(out.shape() == std::vector<long>{2});
  CHECK(std::abs(out.at({0}) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(out.at({1})) < 1e-15);
}

TEST_CASE("contract 2x3 * 3x4 matches a triple-loop matrix product") {
  Tensor a = random_tensor({2, 3}, 11);
  Tensor b = random_tensor({3, 4}, 12);
  Tensor c = contract(a, b, {{1, 0}});
  REQUIRE(c.shape() == std::vector<long>{2, 4});
  for (long i = 0; i < 2; i++)
    for (long j = 0; j < 4; j++) {
      cd v = 0;
      for (long k = 0; k < 3; k++) v += a.at({i, k}) * b.at({k, j});
      CHECK(std::abs(v - c.at({i, j})) < 1e-12);
    }
}

TEST_CASE("self-contraction over all axes gives the squared Frobenius norm") {
  Tensor a = random_tensor({3, 4, 2}, 13);
  Tensor full = contract(conj(a), a, {{0, 0}, {1, 1}, {2, 2}});
  REQUIRE(full.size() == 1);
  const double n = frob_norm(a);
  CHECK(full.at({0}).real() == doctest::Approx(n * n).epsilon(1e-12));
  CHECK(std::abs(full.at({0}).imag()) < 1e-10);
  CHECK(full.at({0}).real() >= 0);
}

TEST_CASE("contract is bilinear in the first argument") {
  Tensor a = random_tensor({3, 5}, 14);
  Tensor b = random_tensor({5, 2}, 15);
  const cd alpha(0.7, -1.3);
  Tensor a_scaled = a;
  for (auto& z : a_scaled.storage()) z *= alpha;
  Tensor lhs = contract(a_scaled, b, {{1, 0}});
  Tensor rhs = contract(a, b, {{1, 0}});
  for (auto& z : rhs.storage()) z *= alpha;
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("contract rejects mismatched axis sizes") {
  Tensor a({2, 3}), b({4, 2});
  CHECK_THROWS_AS(contract(a, b, {{1, 0}}), std::invalid_argument);
}

TEST_CASE("svd of the identity keeps unit singular values") {
  Tensor id({4, 4});
  for (long i = 0; i < 4; i++) id.at({i, i}) = 1;
  SvdResult s = svd_truncate(id, 4, 0.0);
  REQUIRE(s.singular_values.size() == 4);
  for (double v : s.singular_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.discarded_weight == 0.0);
}

TEST_CASE("rank-1 matrix is reconstructed exactly at max_rank 1") {
  Tensor u = random_tensor({6}, 21), v = random_tensor({5}, 22);
  Tensor m({6, 5});
  for (long i = 0; i < 6; i++)
    for (long j = 0; j < 5; j++) m.at({i, j}) = u.at({i}) * std::conj(v.at({j}));
  SvdResult s = svd_truncate(m, 1, 0.0);
  CHECK(s.singular_values.size() == 1);
  CHECK(s.discarded_weight < 1e-28);
  CHECK(max_abs_diff(reconstruct(s), m) < 1e-12);
}

TEST_CASE("truncation error matches the eigendecomposition of m^dag m") {
  Tensor m = random_tensor({8, 8}, 33);
  // oracle: eigenvalues of m^dag m give the squared singular values
  Tensor gram = contract(conj(m), m, {{0, 0}});
  std::vector<double> evals;
  std::vector<cd> evecs;
  la::eigh(gram.data(), 8, evals, evecs);  // ascending
  std::vector<double> sv_sq(evals.rbegin(), evals.rend());

  SvdResult s = svd_truncate(m, 3, 0.0);
  REQUIRE(s.singular_values.size() == 3);
  for (int i = 0; i < 3; i++)
    CHECK(s.singular_values[i] * s.singular_values[i] ==
          doctest::Approx(sv_sq[i]).epsilon(1e-9));

  double dropped = 0, total = 0;
  for (size_t i = 0; i < sv_sq.size(); i++) {
    total += sv_sq[i];
    if (i >= 3) dropped += sv_sq[i];
  }
  CHECK(s.discarded_weight == doctest::Approx(dropped / total).epsilon(1e-9));

  Tensor rec = reconstruct(s);
  double err2 = 0;
  for (long i = 0; i < m.size(); i++) err2 += std::norm(rec.data()[i] - m.data()[i]);
  CHECK(err2 == doctest::Approx(dropped).epsilon(1e-8));
}

TEST_CASE("full-rank zero-cutoff svd reconstructs the input") {
  for (auto shape : {std::vector<long>{7, 7}, {9, 4}, {3, 11}}) {
    Tensor m = random_tensor(shape, 40 + (unsigned)shape[0]);
    SvdResult s = svd_truncate(m, std::min(shape[0], shape[1]), 0.0);
    Tensor rec = reconstruct(s);
    double err = 0;
    for (long i = 0; i < m.size(); i++) err += std::norm(rec.data()[i] - m.data()[i]);
    CHECK(std::sqrt(err) / frob_norm(m) < 1e-10);
  }
}

TEST_CASE("isometry invariants hold to 1e-12") {
  Tensor m = random_tensor({10, 6}, 55);
  SvdResult s = svd_truncate(m, 4, 0.0);
  Tensor ltl = contract(conj(s.left), s.left, {{0, 0}});
  Tensor rrt = contract(s.right, conj(s.right), {{1, 1}});
  for (long i = 0; i < 4; i++)
    for (long j = 0; j < 4; j++) {
      const cd expect = i == j ? cd(1, 0) : cd(0, 0);
      CHECK(std::abs(ltl.at({i, j}) - expect) < 1e-12);
      CHECK(std::abs(rrt.at({i, j}) - expect) < 1e-12);
    }
  // descending, non-negative
  for (size_t i = 0; i + 1 < s.singular_values.size(); i++)
    CHECK(s.singular_values[i] >= s.singular_values[i + 1]);
  CHECK(s.singular_values.back() >= 0);
  CHECK(s.discarded_weight >= 0);
  CHECK(s.discarded_weight <= 1);
}

TEST_CASE("unitary matrices have unit singular values") {
  // build a unitary from the QR of a random matrix
  Tensor m = random_tensor({6, 6}, 60);
  std::vector<cd> q, r;
  la::qr(m.data(), 6, 6, q, r);
  Tensor u({6, 6}, std::move(q));
  SvdResult s = svd_truncate(u, 6, 0.0);
  for (double v : s.singular_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("svd rejects bad input") {
  Tensor m({2, 2});
  m.at({0, 0}) = cd(std::numeric_limits<double>::infinity(), 0);
  CHECK_THROWS_AS(svd_truncate(m, 2, 0.0), std::invalid_argument);
  Tensor ok({2, 2});
  CHECK_THROWS_AS(svd_truncate(ok, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(svd_truncate(ok, 2, -1.0), std::invalid_argument);
  Tensor three({2, 2, 2});
  CHECK_THROWS_AS(svd_truncate(three, 2, 0.0), std::invalid_argument);
}

TEST_CASE("cutoff drops trailing weight") {
  // diagonal matrix with known spectrum
  Tensor m({4, 4});
  const double sv[4] = {1.0, 0.5, 1e-7, 1e-9};
  for (long i = 0; i < 4; i++) m.at({i, i}) = sv[i];
  SvdResult s = svd_truncate(m, 4, 1e-12);
  CHECK(s.singular_values.size() == 2);
  const double total = 1 + 0.25 + 1e-14 + 1e-18;
  CHECK(s.discarded_weight == doctest::Approx((1e-14 + 1e-18) / total).epsilon(1e-6));
}

TEST_CASE("qr and lq factor row-major matrices") {
  Tensor m = random_tensor({8, 5}, 71);
  std::vector<cd> q, r;
  la::qr(m.data(), 8, 5, q, r);
  Tensor tq({8, 5}, q), tr({5, 5}, r);
  CHECK(max_abs_diff(contract(tq, tr, {{1, 0}}), m) < 1e-12);
  Tensor qtq = contract(conj(tq), tq, {{0, 0}});
  for (long i = 0; i < 5; i++)
    for (long j = 0; j < 5; j++)
      CHECK(std::abs(qtq.at({i, j}) - (i == j ? cd(1, 0) : cd(0, 0))) < 1e-12);

  std::vector<cd> l, q2;
  la::lq(m.data(), 8, 5, l, q2);
  Tensor tl({8, 5}, l), tq2({5, 5}, q2);
  CHECK(max_abs_diff(contract(tl, tq2, {{1, 0}}), m) < 1e-12);
}

TEST_CASE("hermitian expm matches a series evaluation") {
  Tensor raw = random_tensor({5, 5}, 81);
  Tensor h({5, 5});
  for (long i = 0; i < 5; i++)
    for (long j = 0; j < 5; j++)
      h.at({i, j}) = 0.5 * (raw.at({i, j}) + std::conj(raw.at({j, i})));
  const cd scale(0, -0.37);
  std::vector<cd> e = la::expm_hermitian(h.data(), 5, scale);
  // series oracle
  Tensor acc({5, 5}), term({5, 5});
  for (long i = 0; i < 5; i++) {
    acc.at({i, i}) = 1;
    term.at({i, i}) = 1;
  }
  for (int k = 1; k < 40; k++) {
    term = contract(term, h, {{1, 0}});
    for (auto& z : term.storage()) z *= scale / double(k);
    for (long i = 0; i < 25; i++) acc.data()[i] += term.data()[i];
  }
  double err = 0;
  for (long i = 0; i < 25; i++) err = std::max(err, std::abs(acc.data()[i] - e[i]));
  CHECK(err < 1e-12);
  // general expm agrees on the Hermitian case
  Tensor hs = h;
  for (auto& z : hs.storage()) z *= scale;
  std::vector<cd> e2 = la::expm_general(hs.data(), 5);
  for (long i = 0; i < 25; i++) CHECK(std::abs(e[i] - e2[i]) < 1e-12);
}
