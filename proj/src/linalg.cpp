#include "basisn/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace basisn {

TilingPlan plan_tiling(const LayerShape& shape, int d) {
    shape.validate();
    if (d <= 0) {
        throw DimensionError("tile width must be positive, got " +
                             std::to_string(d));
    }
    TilingPlan plan;
    plan.flat_len = shape.flat_len();
    plan.partitions = static_cast<int>((plan.flat_len + d - 1) / d);
    plan.tile_count = static_cast<long long>(shape.n) * plan.partitions;
    plan.tail_padding =
        static_cast<int>(plan.partitions * static_cast<long long>(d) -
                         plan.flat_len);
    return plan;
}

std::vector<SubkernelTile> tile_layer(const Eigen::MatrixXd& weights2d,
                                      const LayerShape& shape, int d,
                                      int layer_id) {
    const TilingPlan plan = plan_tiling(shape, d);
    if (weights2d.rows() != shape.n || weights2d.cols() != plan.flat_len) {
        throw DimensionError(
            "weight matrix is " + std::to_string(weights2d.rows()) + "x" +
            std::to_string(weights2d.cols()) + " but shape implies " +
            std::to_string(shape.n) + "x" + std::to_string(plan.flat_len));
    }

    std::vector<SubkernelTile> tiles;
    tiles.reserve(plan.tile_count);
    for (int i = 0; i < shape.n; ++i) {
        for (int j = 0; j < plan.partitions; ++j) {
            SubkernelTile tile;
            tile.layer_id = layer_id;
            tile.kernel_index = i;
            tile.partition_index = j;
            const long long begin = static_cast<long long>(j) * d;
            tile.valid_len =
                static_cast<int>(std::min<long long>(d, plan.flat_len - begin));
            tile.values = Eigen::VectorXd::Zero(d);
            tile.values.head(tile.valid_len) =
                weights2d.row(i).segment(begin, tile.valid_len);
            tiles.push_back(std::move(tile));
        }
    }
    return tiles;
}

Eigen::MatrixXd untile_layer(const std::vector<SubkernelTile>& tiles,
                             const LayerShape& shape, int d) {
    const TilingPlan plan = plan_tiling(shape, d);
    if (static_cast<long long>(tiles.size()) != plan.tile_count) {
        throw DimensionError("expected " + std::to_string(plan.tile_count) +
                             " tiles, got " + std::to_string(tiles.size()));
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(shape.n, plan.flat_len);
    for (const auto& tile : tiles) {
        const long long begin =
            static_cast<long long>(tile.partition_index) * d;
        out.row(tile.kernel_index).segment(begin, tile.valid_len) =
            tile.values.head(tile.valid_len);
    }
    return out;
}

double round_half_away(double x) {
    return std::copysign(std::floor(std::abs(x) + 0.5), x);
}

int32_t quantize_value(double raw, double scale, int coeff_bits) {
    if (!std::isfinite(raw)) {
        throw DataError("cannot quantize non-finite value");
    }
    if (scale <= 0.0 || !std::isfinite(scale)) {
        throw ConfigError("quantizer scale must be positive and finite");
    }
    if (coeff_bits == 1) {
        return raw >= scale / 2.0 ? 1 : 0;
    }
    const double step = coeff_step(scale, coeff_bits);
    double code = round_half_away(raw / step);
    code = std::min(code, static_cast<double>(max_code(coeff_bits)));
    code = std::max(code, static_cast<double>(min_code(coeff_bits)));
    return static_cast<int32_t>(code);
}

std::vector<int16_t> quantize_coefficients(std::span<const double> raw,
                                           const QuantizationConfig& cfg,
                                           double scale) {
    cfg.validate();
    std::vector<int16_t> codes(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        codes[i] = static_cast<int16_t>(quantize_value(raw[i], scale,
                                                       cfg.coeff_bits));
    }
    return codes;
}

CoefficientSet::CoefficientSet(int layer_id, int coeff_bits, double scale,
                               int num_kernels, int num_partitions, int dim)
    : layer_id_(layer_id),
      coeff_bits_(coeff_bits),
      scale_(scale),
      num_kernels_(num_kernels),
      num_partitions_(num_partitions),
      dim_(dim) {
    if (num_kernels <= 0 || num_partitions <= 0 || dim <= 0) {
        throw DimensionError("coefficient set dimensions must be positive");
    }
    if (coeff_bits < kMinCoeffBits || coeff_bits > kMaxCoeffBits) {
        throw ConfigError("coeff_bits must be in [1, 16], got " +
                          std::to_string(coeff_bits));
    }
    if (scale <= 0.0 || !std::isfinite(scale)) {
        throw ConfigError("coefficient scale must be positive and finite");
    }
    codes_.assign(static_cast<size_t>(num_kernels) * num_partitions * dim, 0);
}

int16_t CoefficientSet::code(int kernel, int partition, int l) const {
    return codes_[(static_cast<size_t>(kernel) * num_partitions_ + partition) *
                      dim_ +
                  l];
}

void CoefficientSet::set_code(int kernel, int partition, int l, int16_t v) {
    codes_[(static_cast<size_t>(kernel) * num_partitions_ + partition) * dim_ +
           l] = v;
}

std::span<const int16_t> CoefficientSet::tile_codes(int kernel,
                                                    int partition) const {
    const size_t offset =
        (static_cast<size_t>(kernel) * num_partitions_ + partition) * dim_;
    return {codes_.data() + offset, static_cast<size_t>(dim_)};
}

std::span<int16_t> CoefficientSet::tile_codes(int kernel, int partition) {
    const size_t offset =
        (static_cast<size_t>(kernel) * num_partitions_ + partition) * dim_;
    return {codes_.data() + offset, static_cast<size_t>(dim_)};
}

void CoefficientSet::validate() const {
    const int lo = min_code(coeff_bits_);
    const int hi = max_code(coeff_bits_);
    for (int16_t v : codes_) {
        if (v < lo || v > hi) {
            throw DataError("code " + std::to_string(v) + " outside " +
                            std::to_string(coeff_bits_) + "-bit range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
        }
    }
}

namespace {

// k = c * B  =>  c = k * B^-1. With orthonormal rows the inverse is the
// transpose; otherwise solve with LU, guarded by a condition estimate.
Eigen::MatrixXd solve_coefficients(const Eigen::MatrixXd& kernels,
                                   const BasisMatrix& basis) {
    if (basis.orthogonality_error() <= 1e-6) {
        return kernels * basis.rows().transpose();
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis.rows().transpose());
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > kConditionLimit) {
        throw SingularBasisError(
            "basis condition estimate " +
            std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) +
            " exceeds limit 1e8");
    }
    return lu.solve(kernels.transpose()).transpose();
}

}  // namespace

Eigen::MatrixXd real_coefficients(const Eigen::MatrixXd& weights2d,
                                  const LayerShape& shape,
                                  const BasisMatrix& basis) {
    const int d = basis.dim();
    const TilingPlan plan = plan_tiling(shape, d);
    if (weights2d.rows() != shape.n || weights2d.cols() != plan.flat_len) {
        throw DimensionError("weight matrix does not match layer shape");
    }
    Eigen::MatrixXd coeffs(shape.n, static_cast<long long>(plan.partitions) * d);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(shape.n, d);
    for (int j = 0; j < plan.partitions; ++j) {
        const long long begin = static_cast<long long>(j) * d;
        const int len =
            static_cast<int>(std::min<long long>(d, plan.flat_len - begin));
        block.setZero();
        block.leftCols(len) = weights2d.middleCols(begin, len);
        coeffs.middleCols(static_cast<long long>(j) * d, d) =
            solve_coefficients(block, basis);
    }
    return coeffs;
}

TileDecomposition decompose_tile(const SubkernelTile& tile,
                                 const BasisMatrix& basis,
                                 const QuantizationConfig& cfg) {
    cfg.validate();
    if (tile.values.size() != basis.dim()) {
        throw DimensionError("tile length " + std::to_string(tile.values.size()) +
                             " does not match basis dimension " +
                             std::to_string(basis.dim()));
    }
    const Eigen::MatrixXd coeffs =
        solve_coefficients(tile.values.transpose(), basis);
    TileDecomposition result;
    result.scale = coeffs.cwiseAbs().maxCoeff();
    if (result.scale == 0.0) result.scale = 1.0;  // all-zero tile
    result.codes = quantize_coefficients(
        std::span<const double>(coeffs.data(), coeffs.size()), cfg,
        result.scale);
    return result;
}

CoefficientSet decompose_layer(const Eigen::MatrixXd& weights2d,
                               const LayerShape& shape,
                               const BasisMatrix& basis,
                               const QuantizationConfig& cfg, int layer_id) {
    cfg.validate();
    const Eigen::MatrixXd coeffs = real_coefficients(weights2d, shape, basis);
    double scale = coeffs.cwiseAbs().maxCoeff();
    if (scale == 0.0) scale = 1.0;

    const TilingPlan plan = plan_tiling(shape, basis.dim());
    CoefficientSet set(layer_id, cfg.coeff_bits, scale, shape.n,
                       plan.partitions, basis.dim());
    for (int i = 0; i < shape.n; ++i) {
        for (int j = 0; j < plan.partitions; ++j) {
            auto tile = set.tile_codes(i, j);
            for (int l = 0; l < basis.dim(); ++l) {
                tile[l] = static_cast<int16_t>(quantize_value(
                    coeffs(i, static_cast<long long>(j) * basis.dim() + l),
                    scale, cfg.coeff_bits));
            }
        }
    }
    return set;
}

Eigen::VectorXd reconstruct_tile(std::span<const int16_t> codes, double scale,
                                 int coeff_bits,
                                 const Eigen::MatrixXd& basis_rows) {
    if (static_cast<Eigen::Index>(codes.size()) != basis_rows.rows()) {
        throw DimensionError("code count " + std::to_string(codes.size()) +
                             " does not match basis dimension " +
                             std::to_string(basis_rows.rows()));
    }
    const double step = coeff_step(scale, coeff_bits);
    Eigen::VectorXd c(codes.size());
    for (size_t l = 0; l < codes.size(); ++l) {
        c[l] = static_cast<double>(codes[l]) * step;
    }
    return basis_rows.transpose() * c;
}

Eigen::MatrixXd reconstruct_layer(const CoefficientSet& coeffs,
                                  const Eigen::MatrixXd& basis_rows,
                                  const LayerShape& shape) {
    const int d = coeffs.dim();
    if (basis_rows.rows() != d || basis_rows.cols() != d) {
        throw DimensionError("basis dimension does not match coefficients");
    }
    const TilingPlan plan = plan_tiling(shape, d);
    if (plan.partitions != coeffs.num_partitions() ||
        shape.n != coeffs.num_kernels()) {
        throw DimensionError("layer shape does not match coefficient set");
    }
    const double step = coeff_step(coeffs.scale(), coeffs.coeff_bits());
    Eigen::MatrixXd out(shape.n, plan.flat_len);
    Eigen::VectorXd c(d);
    for (int i = 0; i < shape.n; ++i) {
        for (int j = 0; j < plan.partitions; ++j) {
            const auto codes = coeffs.tile_codes(i, j);
            for (int l = 0; l < d; ++l) {
                c[l] = static_cast<double>(codes[l]) * step;
            }
            const long long begin = static_cast<long long>(j) * d;
            const int len =
                static_cast<int>(std::min<long long>(d, plan.flat_len - begin));
            out.row(i).segment(begin, len) =
                (basis_rows.transpose() * c).head(len);
        }
    }
    return out;
}

}  // namespace basisn
