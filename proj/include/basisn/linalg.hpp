#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "basisn/basis.hpp"
#include "basisn/bits.hpp"
#include "basisn/types.hpp"

namespace basisn {

// Length-d slice `partition_index` of flattened kernel `kernel_index`.
// The tail beyond valid_len is exact zero padding.
struct SubkernelTile {
    int layer_id = 0;
    int kernel_index = 0;
    int partition_index = 0;
    int valid_len = 0;
    Eigen::VectorXd values;
};

struct TilingPlan {
    int partitions = 0;        // per kernel
    long long tile_count = 0;  // n * partitions
    long long flat_len = 0;
    int tail_padding = 0;      // zeros appended to the last partition
};

TilingPlan plan_tiling(const LayerShape& shape, int d);

// weights2d holds one flattened kernel per row, shape (n, t*w*h).
std::vector<SubkernelTile> tile_layer(const Eigen::MatrixXd& weights2d,
                                      const LayerShape& shape, int d,
                                      int layer_id = 0);

// Inverse of tile_layer; drops the padding.
Eigen::MatrixXd untile_layer(const std::vector<SubkernelTile>& tiles,
                             const LayerShape& shape, int d);

double round_half_away(double x);

// One value through the coefficient quantizer: round to the step grid and
// clamp to the N-bit code range. N == 1 thresholds at scale/2 into {0, 1}.
int32_t quantize_value(double raw, double scale, int coeff_bits);

std::vector<int16_t> quantize_coefficients(std::span<const double> raw,
                                           const QuantizationConfig& cfg,
                                           double scale);

// Per-layer quantized combination coefficients, laid out as a dense
// (num_kernels, num_partitions, dim) int16 tensor with one shared scale.
class CoefficientSet {
public:
    CoefficientSet(int layer_id, int coeff_bits, double scale, int num_kernels,
                   int num_partitions, int dim);

    int layer_id() const { return layer_id_; }
    int coeff_bits() const { return coeff_bits_; }
    double scale() const { return scale_; }
    int num_kernels() const { return num_kernels_; }
    int num_partitions() const { return num_partitions_; }
    int dim() const { return dim_; }

    int16_t code(int kernel, int partition, int l) const;
    void set_code(int kernel, int partition, int l, int16_t v);
    std::span<const int16_t> tile_codes(int kernel, int partition) const;
    std::span<int16_t> tile_codes(int kernel, int partition);
    const std::vector<int16_t>& raw() const { return codes_; }
    std::vector<int16_t>& raw() { return codes_; }

    // Throws if any code is outside the N-bit range.
    void validate() const;

private:
    int layer_id_;
    int coeff_bits_;
    double scale_;
    int num_kernels_;
    int num_partitions_;
    int dim_;
    std::vector<int16_t> codes_;
};

struct TileDecomposition {
    std::vector<int16_t> codes;
    double scale = 0.0;
};

// Real (pre-quantization) coefficients of every tile of a layer: row i holds
// the concatenated per-partition coefficient vectors of kernel i, so the
// result has shape (n, partitions*d). Uses B^T when the basis is orthonormal
// and a guarded LU solve otherwise.
Eigen::MatrixXd real_coefficients(const Eigen::MatrixXd& weights2d,
                                  const LayerShape& shape,
                                  const BasisMatrix& basis);

TileDecomposition decompose_tile(const SubkernelTile& tile,
                                 const BasisMatrix& basis,
                                 const QuantizationConfig& cfg);

CoefficientSet decompose_layer(const Eigen::MatrixXd& weights2d,
                               const LayerShape& shape,
                               const BasisMatrix& basis,
                               const QuantizationConfig& cfg,
                               int layer_id = 0);

// (codes * step) * rows. Pass basis.rows() for the mathematical
// reconstruction or basis.cell_rows() for what the crossbar computes.
Eigen::VectorXd reconstruct_tile(std::span<const int16_t> codes, double scale,
                                 int coeff_bits,
                                 const Eigen::MatrixXd& basis_rows);

// Reassembled (n, t*w*h) weight matrix from a layer's coefficients.
Eigen::MatrixXd reconstruct_layer(const CoefficientSet& coeffs,
                                  const Eigen::MatrixXd& basis_rows,
                                  const LayerShape& shape);

}  // namespace basisn
