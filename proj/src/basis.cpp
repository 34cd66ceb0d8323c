#include "basisn/basis.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "basisn/linalg.hpp"

namespace basisn {

Eigen::MatrixXd quantize_cells(const Eigen::MatrixXd& m, int cell_bits) {
    if (cell_bits < kMinCellBits || cell_bits > kMaxCellBits) {
        throw ConfigError("cell_bits must be in [1, 6], got " +
                          std::to_string(cell_bits));
    }
    const double maxabs = m.cwiseAbs().maxCoeff();
    if (maxabs == 0.0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());

    const int levels = 1 << cell_bits;
    const double step = 2.0 * maxabs / (levels - 1);
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double idx = round_half_away((m(r, c) + maxabs) / step);
            idx = std::min(std::max(idx, 0.0), static_cast<double>(levels - 1));
            out(r, c) = -maxabs + idx * step;
        }
    }
    return out;
}

BasisMatrix::BasisMatrix(Eigen::MatrixXd rows, int cell_bits)
    : cell_bits_(cell_bits), rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.rows() != rows_.cols()) {
        throw DimensionError("basis must be a non-empty square matrix, got " +
                             std::to_string(rows_.rows()) + "x" +
                             std::to_string(rows_.cols()));
    }
    cell_rows_ = quantize_cells(rows_, cell_bits_);
}

double BasisMatrix::orthogonality_error() const {
    const Eigen::MatrixXd gram = rows_ * rows_.transpose();
    const Eigen::MatrixXd eye =
        Eigen::MatrixXd::Identity(rows_.rows(), rows_.rows());
    return (gram - eye).cwiseAbs().maxCoeff();
}

BasisMatrix init_orthogonal_basis(int d, uint64_t seed, int cell_bits) {
    if (d <= 0) {
        throw DimensionError("basis dimension must be positive, got " +
                             std::to_string(d));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            g(r, c) = gauss(rng);
        }
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r =
        qr.matrixQR().triangularView<Eigen::Upper>();
    // Fixing the sign of R's diagonal makes the factorization unique, so the
    // basis depends only on the seed.
    for (int c = 0; c < d; ++c) {
        if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    }
    return BasisMatrix(q.transpose(), cell_bits);
}

}  // namespace basisn
