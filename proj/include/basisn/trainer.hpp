#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "basisn/basis.hpp"
#include "basisn/linalg.hpp"
#include "basisn/types.hpp"

namespace basisn {

// Alternating-training settings. The learning-rate/epoch asymmetry
// (eta_basis << eta_coeffs, t_basis < t_coeffs) keeps the basis close to its
// initial orthogonality while the coefficients do most of the fitting.
struct TrainerConfig {
    int epochs = 200;
    int t_coeffs = 2;
    int t_basis = 1;
    double eta_coeffs = 0.05;
    double eta_basis = 1e-3;
    double beta = 0.0;  // contest-regularizer weight
    int coeff_bits = 4;
    uint64_t seed = 0;
    int batch_size = 32;
    std::string dataset = "blobs";
    int samples = 512;
    int input_dim = 16;
    int classes = 2;
    int hidden = 32;
    double blob_spread = 3.0;

    void validate() const;
};

struct Dataset {
    Eigen::MatrixXd x;  // samples x features
    Eigen::VectorXi y;  // class labels
    int classes = 0;
};

// Seeded Gaussian blobs: class means on a sphere of radius `spread`,
// unit-variance noise.
Dataset make_blobs(uint64_t seed, int samples, int dim, int classes,
                   double spread);

// Seeded 8x8 digit-like glyphs (10 classes): fixed prototype bitmaps with
// pixel-flip and Gaussian noise.
Dataset make_digits(uint64_t seed, int samples);

enum class Phase { Coefficients, Basis };

const char* phase_name(Phase phase);

// Which parameter group epoch t_i (1-based) trains: the first t_coeffs
// epochs of every (t_coeffs + t_basis)-epoch cycle train the coefficients,
// the remainder the basis.
Phase phase_for_epoch(int t_i, int t_coeffs, int t_basis);

// One linear layer in basis form: real shadow coefficients (quantized on the
// forward pass) plus a full-precision bias.
struct LayerParams {
    LayerShape shape;
    int partitions = 0;
    Eigen::MatrixXd coeffs;  // n x (partitions * d) shadow values
    Eigen::VectorXd bias;

    double scale() const;  // per-layer max-abs coefficient
};

// MLP whose every weight matrix is a combination of the shared basis.
struct TrainableModel {
    int dim = 0;
    int coeff_bits = 4;
    Eigen::MatrixXd basis;  // full precision; cell-quantized only for eval/sim
    std::vector<LayerParams> layers;
    Phase phase = Phase::Coefficients;

    double orthogonality_error() const;
    CoefficientSet layer_codes(int layer) const;
    double mean_popcount() const;
};

TrainableModel make_mlp(int input_dim, int hidden, int classes, int d,
                        int coeff_bits, uint64_t seed);

// Logits for a batch. quantized=true runs coefficients through the N-bit
// quantizer (straight-through in training, hard in evaluation);
// basis_override substitutes e.g. the cell-quantized basis image.
Eigen::MatrixXd forward(const TrainableModel& model, const Eigen::MatrixXd& x,
                        bool quantized,
                        const Eigen::MatrixXd* basis_override = nullptr);

// Cross entropy plus beta * total popcount of the quantized codes.
double loss(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels,
            const TrainableModel& model, double beta);

double cross_entropy(const Eigen::MatrixXd& logits,
                     const Eigen::VectorXi& labels);

// Analytic gradients of the unquantized cross-entropy path, for all
// parameter groups at once. Used by training and by the finite-difference
// checks.
struct Gradients {
    std::vector<Eigen::MatrixXd> coeffs;
    std::vector<Eigen::VectorXd> bias;
    Eigen::MatrixXd basis;
};

Gradients analytic_gradients(const TrainableModel& model,
                             const Eigen::MatrixXd& x,
                             const Eigen::VectorXi& y, bool quantized,
                             double beta);

struct EpochStats {
    int epoch = 0;
    Phase phase = Phase::Coefficients;
    double loss = 0.0;
    double accuracy = 0.0;
    double mean_popcount = 0.0;
    double orthogonality_error = 0.0;
    double coeff_update_norm = 0.0;
    double basis_update_norm = 0.0;
};

struct TrainResult {
    TrainableModel model;
    std::vector<EpochStats> history;
};

// Alternating SGD over coefficients and basis. Deterministic for a fixed
// seed; aborts with context if the loss stops being finite.
TrainResult train(TrainableModel model, const Dataset& data,
                  const TrainerConfig& cfg);

// Fine-tune initialization from pretrained per-layer weight matrices: shadow
// coefficients are the real per-tile projections k * B^-1, so quantizing
// them yields codes = quantize(k * B^-1, N) at the per-layer scale.
TrainableModel finetune_init(const std::vector<Eigen::MatrixXd>& weights,
                             const std::vector<Eigen::VectorXd>& biases,
                             const std::vector<LayerShape>& shapes,
                             const BasisMatrix& basis,
                             const TrainerConfig& cfg);

// Evaluation accuracy with hard-quantized coefficients. cell_bits, when
// given, evaluates against the cell-quantized basis image.
double evaluate_accuracy(const TrainableModel& model, const Dataset& data,
                         std::optional<int> cell_bits = std::nullopt);

// Plain float MLP trained with the same SGD loop; the unconstrained
// baseline the basis-form model is compared against.
struct FloatMlp {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
};

FloatMlp train_float_mlp(const Dataset& data, int hidden, int epochs,
                         double eta, int batch_size, uint64_t seed);
double evaluate_accuracy(const FloatMlp& mlp, const Dataset& data);

}  // namespace basisn
