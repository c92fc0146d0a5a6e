#include "nap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nap/errors.hpp"

namespace nap {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix expm_action(const ComplexMatrix& a, Complex scale) {
  if (a.rows() != a.cols()) {
    throw DimensionError("expm_action: matrix is not square");
  }
  const Eigen::Index n = a.rows();
  ComplexMatrix x = scale * a;
  const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x /= std::ldexp(1.0, squarings);
  }
  ComplexMatrix sum = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * x) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) {
      break;
    }
  }
  for (int s = 0; s < squarings; ++s) {
    sum = sum * sum;
  }
  return sum;
}

StateVector expm_apply(const ComplexMatrix& a, Complex scale, const StateVector& v) {
  if (a.rows() != a.cols() || a.cols() != v.size()) {
    throw DimensionError("expm_apply: dimension mismatch");
  }
  const double norm = std::abs(scale) * a.cwiseAbs().colwise().sum().maxCoeff();
  const int substeps = norm > 0.5 ? static_cast<int>(std::ceil(norm / 0.5)) : 1;
  const Complex h = scale / static_cast<double>(substeps);
  StateVector out = v;
  for (int s = 0; s < substeps; ++s) {
    StateVector term = out;
    StateVector sum = out;
    for (int k = 1; k <= 40; ++k) {
      term = (h / static_cast<double>(k)) * (a * term);
      sum += term;
      if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) {
        break;
      }
    }
    out = sum;
  }
  return out;
}

ComplexMatrix gram(const ComplexMatrix& columns) { return columns.adjoint() * columns; }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("commutator: dimension mismatch");
  }
  return a * b - b * a;
}

ComplexMatrix projector(const StateVector& v) { return v * v.adjoint(); }

StateVector basis_vector(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) {
    throw DimensionError("basis_vector: index out of range");
  }
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

double hermitian_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hermitian_defect: matrix is not square");
  }
  if (a.size() == 0) {
    return 0.0;
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double relative_tolerance) {
  const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  return hermitian_defect(a) <= relative_tolerance * std::max(1.0, scale);
}

double fidelity(const StateVector& target, const StateVector& state) {
  if (target.size() != state.size()) {
    throw DimensionError("fidelity: dimension mismatch");
  }
  return std::norm(target.dot(state));
}

double fidelity(const StateVector& target, const DensityMatrix& rho) {
  if (rho.rows() != target.size() || rho.cols() != target.size()) {
    throw DimensionError("fidelity: dimension mismatch");
  }
  return (target.adjoint() * rho * target)(0, 0).real();
}

double min_eigenvalue(const DensityMatrix& rho) {
  const ComplexMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix lowering() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

}  // namespace pauli

ComplexMatrix embed_qubit_operator(const ComplexMatrix& op, std::size_t qubit, std::size_t count) {
  if (op.rows() != 2 || op.cols() != 2) {
    throw DimensionError("embed_qubit_operator: operator must be 2x2");
  }
  if (qubit >= count) {
    throw DimensionError("embed_qubit_operator: qubit index out of range");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t q = 0; q < count; ++q) {
    out = kron(out, q == qubit ? op : pauli::identity());
  }
  return out;
}

}  // namespace nap
