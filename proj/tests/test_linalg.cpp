#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nap/errors.hpp"
#include "nap/linalg.hpp"

using namespace nap;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = Complex(n(rng), n(rng));
    }
  }
  return m;
}

// Plain Taylor sum without scaling, stopped once a term drops below 1e-14.
ComplexMatrix taylor_oracle(const ComplexMatrix& x) {
  ComplexMatrix sum = ComplexMatrix::Identity(x.rows(), x.cols());
  ComplexMatrix term = sum;
  for (int k = 1; k < 200; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-14) {
      break;
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("kron of diagonal Pauli z with identity") {
  const ComplexMatrix k = kron(pauli::z(), pauli::identity());
  Eigen::VectorXcd diag(4);
  diag << 1.0, 1.0, -1.0, -1.0;
  CHECK((k - ComplexMatrix(diag.asDiagonal())).norm() == 0.0);
  CHECK((kron(pauli::identity(), pauli::identity()) - ComplexMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("kron matches element expansion and the mixed-product rule") {
  std::mt19937_64 rng(7);
  const ComplexMatrix a = random_matrix(rng, 3, 3);
  const ComplexMatrix b = random_matrix(rng, 2, 2);
  const ComplexMatrix c = random_matrix(rng, 3, 3);
  const ComplexMatrix d = random_matrix(rng, 2, 2);
  const ComplexMatrix k = kron(a, b);
  REQUIRE(k.rows() == 6);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          worst = std::max(worst, std::abs(k(2 * i + p, 2 * j + q) - a(i, j) * b(p, q)));
        }
      }
    }
  }
  CHECK(worst == 0.0);
  CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
}

TEST_CASE("expm of a Pauli rotation and of zero") {
  const ComplexMatrix u = expm_action(pauli::x(), -kI * std::numbers::pi / 2.0);
  CHECK((u - (-kI) * pauli::x()).norm() < 1e-14);
  const ComplexMatrix z = ComplexMatrix::Zero(5, 5);
  CHECK((expm_action(z, Complex(3.0, -2.0)) - ComplexMatrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("expm of random anti-Hermitian matrices is unitary and matches the Taylor oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix h = random_matrix(rng, 6, 6);
    h = 0.5 * (h + h.adjoint()).eval();
    const double target_norm = 1.0 + 9.0 * trial / 19.0;
    h *= target_norm / h.norm();
    const ComplexMatrix u = expm_action(h, -kI);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(6, 6)).norm() <= 1e-11);
    const ComplexMatrix oracle = taylor_oracle(-kI * h);
    CHECK((u - oracle).norm() / oracle.norm() <= 1e-12);
    const StateVector v = random_matrix(rng, 6, 1);
    CHECK((expm_apply(h, -kI, v) - u * v).norm() <= 1e-12 * v.norm());
  }
}

TEST_CASE("expm of a general matrix satisfies exp(A) exp(-A) = I") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_matrix(rng, 4, 4);
  const ComplexMatrix prod = expm_action(a, 1.0) * expm_action(a, -1.0);
  CHECK((prod - ComplexMatrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(expm_action(ComplexMatrix::Zero(2, 3), 1.0), DimensionError);
  CHECK_THROWS_AS(expm_apply(ComplexMatrix::Zero(2, 2), 1.0, StateVector::Zero(3)), DimensionError);
  CHECK_THROWS_AS(commutator(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)), DimensionError);
  CHECK_THROWS_AS(basis_vector(3, 3), DimensionError);
  CHECK_THROWS_AS(embed_qubit_operator(pauli::x(), 2, 2), DimensionError);
}

TEST_CASE("Gram matrix, Hermiticity and fidelity helpers") {
  std::mt19937_64 rng(5);
  const ComplexMatrix q = random_matrix(rng, 4, 4).householderQr().householderQ();
  CHECK((gram(q) - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  ComplexMatrix h = random_matrix(rng, 3, 3);
  CHECK_FALSE(is_hermitian(h, 1e-12));
  h = (h + h.adjoint()).eval();
  CHECK(is_hermitian(h, 1e-12));
  CHECK(hermitian_defect(h) == 0.0);

  StateVector bell = StateVector::Zero(4);
  bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
  CHECK(fidelity(bell, projector(bell)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(bell, DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0)) == doctest::Approx(0.25));
  CHECK(min_eigenvalue(projector(bell)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("qubit operator embedding orders qubit 0 leftmost") {
  const ComplexMatrix l0 = embed_qubit_operator(pauli::lowering(), 0, 2);
  // sigma- on qubit 0 maps |eg> (index 2) to |gg> (index 0).
  CHECK(l0(0, 2) == Complex(1.0, 0.0));
  CHECK(l0.cwiseAbs().sum() == doctest::Approx(2.0));
  CHECK((embed_qubit_operator(pauli::z(), 1, 2) - kron(pauli::identity(), pauli::z())).norm() == 0.0);
}
