#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

namespace nap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// exp(scale * a) by scaling and squaring with a Taylor core.
ComplexMatrix expm_action(const ComplexMatrix& a, Complex scale);

// exp(scale * a) * v with the same scaling and truncation, without forming the exponential.
StateVector expm_apply(const ComplexMatrix& a, Complex scale, const StateVector& v);

// Gram matrix C^dagger C of the column vectors of C.
ComplexMatrix gram(const ComplexMatrix& columns);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix projector(const StateVector& v);
StateVector basis_vector(Eigen::Index dim, Eigen::Index index);

// Largest |A - A^dagger| entry.
double hermitian_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double relative_tolerance);

double fidelity(const StateVector& target, const StateVector& state);
double fidelity(const StateVector& target, const DensityMatrix& rho);

// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const DensityMatrix& rho);

// Single-qubit operators in the (g, e) basis: index 0 is |g>, index 1 is |e>.
namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
ComplexMatrix lowering();  // |g><e|
}  // namespace pauli

// Places a single-qubit operator on `qubit` of a `count`-qubit register, qubit 0 leftmost.
ComplexMatrix embed_qubit_operator(const ComplexMatrix& op, std::size_t qubit, std::size_t count);

}  // namespace nap
