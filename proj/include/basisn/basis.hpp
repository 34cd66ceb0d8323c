#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "basisn/types.hpp"

namespace basisn {

// Uniform symmetric quantization of all entries to 2^cell_bits levels spread
// over [-maxabs, +maxabs] of the input matrix. Deterministic; idempotent on
// values already on the grid.
Eigen::MatrixXd quantize_cells(const Eigen::MatrixXd& m, int cell_bits);

// The shared d x d basis. Row l is basis vector b_l. `cell_rows()` is the
// image of the basis after cell quantization, i.e. what the crossbars
// actually store; `rows()` is the full-precision matrix the math uses.
class BasisMatrix {
public:
    BasisMatrix(Eigen::MatrixXd rows, int cell_bits);

    int dim() const { return static_cast<int>(rows_.rows()); }
    int cell_bits() const { return cell_bits_; }
    const Eigen::MatrixXd& rows() const { return rows_; }
    const Eigen::MatrixXd& cell_rows() const { return cell_rows_; }

    // max |B*B^T - I|
    double orthogonality_error() const;

private:
    int cell_bits_;
    Eigen::MatrixXd rows_;
    Eigen::MatrixXd cell_rows_;
};

// Random orthonormal basis: QR of a seeded Gaussian matrix with the sign of
// R's diagonal fixed, so the result is deterministic for a given seed.
BasisMatrix init_orthogonal_basis(int d, uint64_t seed, int cell_bits = 4);

}  // namespace basisn
