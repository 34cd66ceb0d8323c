#include "basisn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace basisn {

void TrainerConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (t_coeffs < 1 || t_basis < 1) {
        throw ConfigError("t_coeffs and t_basis must be at least 1");
    }
    if (eta_coeffs <= 0.0 || eta_basis < 0.0) {
        throw ConfigError("learning rates must be positive (eta_basis may be 0)");
    }
    if (beta < 0.0) throw ConfigError("beta must be non-negative");
    if (coeff_bits < kMinCoeffBits || coeff_bits > kMaxCoeffBits) {
        throw ConfigError("coeff_bits must be in [1, 16]");
    }
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (samples < 2) throw ConfigError("need at least 2 samples");
    if (input_dim < 1 || classes < 2 || hidden < 0) {
        throw ConfigError("invalid model shape");
    }
    if (dataset != "blobs" && dataset != "digits") {
        throw ConfigError("unknown dataset '" + dataset +
                          "' (expected 'blobs' or 'digits')");
    }
}

Dataset make_blobs(uint64_t seed, int samples, int dim, int classes,
                   double spread) {
    if (samples < classes || dim < 1 || classes < 2) {
        throw ConfigError("invalid blob dataset parameters");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd means(classes, dim);
    for (int c = 0; c < classes; ++c) {
        for (int k = 0; k < dim; ++k) means(c, k) = gauss(rng);
        means.row(c) *= spread / std::max(means.row(c).norm(), 1e-12);
    }

    Dataset data;
    data.classes = classes;
    data.x.resize(samples, dim);
    data.y.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const int label = i % classes;
        data.y[i] = label;
        for (int k = 0; k < dim; ++k) {
            data.x(i, k) = means(label, k) + gauss(rng);
        }
    }
    return data;
}

namespace {

// 8x8 glyph prototypes for the ten digits. '#' is an on pixel.
constexpr const char* kDigitGlyphs[10][8] = {
    {"..####..", ".#....#.", ".#...##.", ".#..#.#.", ".#.#..#.", ".##...#.",
     ".#....#.", "..####.."},
    {"...##...", "..###...", "...##...", "...##...", "...##...", "...##...",
     "...##...", ".######."},
    {"..####..", ".#....#.", "......#.", ".....#..", "...##...", "..#.....",
     ".#......", ".######."},
    {"..####..", ".#....#.", "......#.", "...###..", "......#.", "......#.",
     ".#....#.", "..####.."},
    {"....##..", "...#.#..", "..#..#..", ".#...#..", ".######.", ".....#..",
     ".....#..", ".....#.."},
    {".######.", ".#......", ".#......", ".#####..", "......#.", "......#.",
     ".#....#.", "..####.."},
    {"..####..", ".#......", ".#......", ".#####..", ".#....#.", ".#....#.",
     ".#....#.", "..####.."},
    {".######.", "......#.", ".....#..", "....#...", "...#....", "...#....",
     "...#....", "...#...."},
    {"..####..", ".#....#.", ".#....#.", "..####..", ".#....#.", ".#....#.",
     ".#....#.", "..####.."},
    {"..####..", ".#....#.", ".#....#.", "..#####.", "......#.", "......#.",
     "......#.", "..####.."},
};

}  // namespace

Dataset make_digits(uint64_t seed, int samples) {
    if (samples < 10) throw ConfigError("need at least 10 digit samples");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Dataset data;
    data.classes = 10;
    data.x.resize(samples, 64);
    data.y.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const int label = i % 10;
        data.y[i] = label;
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                double v = kDigitGlyphs[label][r][c] == '#' ? 1.0 : 0.0;
                if (uniform(rng) < 0.05) v = 1.0 - v;  // pixel flip
                data.x(i, r * 8 + c) = v + 0.15 * gauss(rng);
            }
        }
    }
    return data;
}

const char* phase_name(Phase phase) {
    return phase == Phase::Coefficients ? "coeffs" : "basis";
}

Phase phase_for_epoch(int t_i, int t_coeffs, int t_basis) {
    if (t_i < 1) throw ConfigError("epochs are 1-based");
    if (t_coeffs < 1 || t_basis < 1) {
        throw ConfigError("t_coeffs and t_basis must be at least 1");
    }
    const int pos = (t_i - 1) % (t_coeffs + t_basis);
    return pos < t_coeffs ? Phase::Coefficients : Phase::Basis;
}

double LayerParams::scale() const {
    const double s = coeffs.cwiseAbs().maxCoeff();
    return s > 0.0 ? s : 1.0;
}

double TrainableModel::orthogonality_error() const {
    const Eigen::MatrixXd gram = basis * basis.transpose();
    return (gram - Eigen::MatrixXd::Identity(basis.rows(), basis.rows()))
        .cwiseAbs()
        .maxCoeff();
}

CoefficientSet TrainableModel::layer_codes(int layer) const {
    const auto& lp = layers.at(static_cast<size_t>(layer));
    const double s = lp.scale();
    CoefficientSet set(layer, coeff_bits, s, lp.shape.n, lp.partitions, dim);
    for (int i = 0; i < lp.shape.n; ++i) {
        for (int j = 0; j < lp.partitions; ++j) {
            auto tile = set.tile_codes(i, j);
            for (int l = 0; l < dim; ++l) {
                tile[l] = static_cast<int16_t>(quantize_value(
                    lp.coeffs(i, static_cast<long long>(j) * dim + l), s,
                    coeff_bits));
            }
        }
    }
    return set;
}

double TrainableModel::mean_popcount() const {
    long long total = 0;
    long long count = 0;
    for (size_t layer = 0; layer < layers.size(); ++layer) {
        const CoefficientSet set = layer_codes(static_cast<int>(layer));
        for (int16_t v : set.raw()) {
            total += popcount_code(v, coeff_bits);
        }
        count += static_cast<long long>(set.raw().size());
    }
    return count > 0 ? static_cast<double>(total) / static_cast<double>(count)
                     : 0.0;
}

TrainableModel make_mlp(int input_dim, int hidden, int classes, int d,
                        int coeff_bits, uint64_t seed) {
    TrainableModel model;
    model.dim = d;
    model.coeff_bits = coeff_bits;
    model.basis = init_orthogonal_basis(d, seed).rows();

    std::vector<std::pair<int, int>> sizes;  // (fan_out, fan_in)
    if (hidden > 0) {
        sizes = {{hidden, input_dim}, {classes, hidden}};
    } else {
        sizes = {{classes, input_dim}};
    }

    std::mt19937_64 rng(hash_combine(seed, 0x6d6c70ull));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& [fan_out, fan_in] : sizes) {
        LayerParams lp;
        lp.shape = LayerShape{fan_out, fan_in, 1, 1};
        lp.partitions = static_cast<int>((fan_in + d - 1) / d);
        const double std_dev = std::sqrt(2.0 / fan_in);
        lp.coeffs.resize(fan_out, static_cast<long long>(lp.partitions) * d);
        for (Eigen::Index r = 0; r < lp.coeffs.rows(); ++r) {
            for (Eigen::Index c = 0; c < lp.coeffs.cols(); ++c) {
                lp.coeffs(r, c) = std_dev * gauss(rng);
            }
        }
        lp.bias = Eigen::VectorXd::Zero(fan_out);
        model.layers.push_back(std::move(lp));
    }
    return model;
}

namespace {

// Quantized real coefficient values (codes * step) for one layer, or a plain
// copy on the unquantized path.
Eigen::MatrixXd effective_coefficients(const LayerParams& lp, int coeff_bits,
                                       bool quantized, double* scale_out) {
    const double s = lp.scale();
    if (scale_out != nullptr) *scale_out = s;
    if (!quantized) return lp.coeffs;
    const double step = coeff_step(s, coeff_bits);
    Eigen::MatrixXd cq(lp.coeffs.rows(), lp.coeffs.cols());
    for (Eigen::Index r = 0; r < cq.rows(); ++r) {
        for (Eigen::Index c = 0; c < cq.cols(); ++c) {
            cq(r, c) =
                quantize_value(lp.coeffs(r, c), s, coeff_bits) * step;
        }
    }
    return cq;
}

// W (n x fan_in) assembled from per-partition coefficient blocks.
Eigen::MatrixXd assemble_weights(const Eigen::MatrixXd& cq,
                                 const LayerParams& lp,
                                 const Eigen::MatrixXd& basis, int d) {
    const long long fan_in = lp.shape.flat_len();
    Eigen::MatrixXd w(lp.shape.n, fan_in);
    for (int j = 0; j < lp.partitions; ++j) {
        const long long begin = static_cast<long long>(j) * d;
        const int len = static_cast<int>(std::min<long long>(d, fan_in - begin));
        w.middleCols(begin, len) =
            cq.middleCols(begin, d) * basis.leftCols(len);
    }
    return w;
}

struct LayerCache {
    double scale = 0.0;
    Eigen::MatrixXd cq;       // effective coefficients
    Eigen::MatrixXd weights;  // n x fan_in
    Eigen::MatrixXd x_in;     // batch x fan_in
    Eigen::MatrixXd pre;      // batch x n
};

Eigen::MatrixXd forward_cached(const TrainableModel& model,
                               const Eigen::MatrixXd& x, bool quantized,
                               const Eigen::MatrixXd* basis_override,
                               std::vector<LayerCache>* caches) {
    const Eigen::MatrixXd& basis =
        basis_override != nullptr ? *basis_override : model.basis;
    if (basis.rows() != model.dim || basis.cols() != model.dim) {
        throw DimensionError("basis dimension does not match model");
    }
    Eigen::MatrixXd h = x;
    for (size_t layer = 0; layer < model.layers.size(); ++layer) {
        const auto& lp = model.layers[layer];
        if (h.cols() != lp.shape.flat_len()) {
            throw DimensionError(
                "layer " + std::to_string(layer) + " expects " +
                std::to_string(lp.shape.flat_len()) + " inputs, got " +
                std::to_string(h.cols()));
        }
        LayerCache cache;
        cache.cq = effective_coefficients(lp, model.coeff_bits, quantized,
                                          &cache.scale);
        cache.weights = assemble_weights(cache.cq, lp, basis, model.dim);
        cache.x_in = h;
        cache.pre = (h * cache.weights.transpose()).rowwise() +
                    lp.bias.transpose();
        if (layer + 1 < model.layers.size()) {
            h = cache.pre.cwiseMax(0.0);  // ReLU
        } else {
            h = cache.pre;
        }
        if (caches != nullptr) caches->push_back(std::move(cache));
    }
    return h;
}

}  // namespace

Eigen::MatrixXd forward(const TrainableModel& model, const Eigen::MatrixXd& x,
                        bool quantized,
                        const Eigen::MatrixXd* basis_override) {
    return forward_cached(model, x, quantized, basis_override, nullptr);
}

double cross_entropy(const Eigen::MatrixXd& logits,
                     const Eigen::VectorXi& labels) {
    if (logits.rows() != labels.size()) {
        throw DimensionError("logit/label batch size mismatch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        const double lse =
            m + std::log((logits.row(i).array() - m).exp().sum());
        total += lse - logits(i, labels[i]);
    }
    return total / static_cast<double>(logits.rows());
}

double loss(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels,
            const TrainableModel& model, double beta) {
    if (beta < 0.0) throw ConfigError("beta must be non-negative");
    double reg = 0.0;
    if (beta > 0.0) {
        for (size_t layer = 0; layer < model.layers.size(); ++layer) {
            const CoefficientSet set =
                model.layer_codes(static_cast<int>(layer));
            for (int16_t v : set.raw()) {
                reg += popcount_code(v, model.coeff_bits);
            }
        }
    }
    return cross_entropy(logits, labels) + beta * reg;
}

namespace {

struct BatchEval {
    double ce = 0.0;
    int correct = 0;
    Gradients grads;
};

BatchEval eval_batch(const TrainableModel& model, const Eigen::MatrixXd& x,
                     const Eigen::VectorXi& y, bool quantized, double beta,
                     bool want_grads) {
    std::vector<LayerCache> caches;
    const Eigen::MatrixXd logits =
        forward_cached(model, x, quantized, nullptr, &caches);

    BatchEval eval;
    eval.ce = cross_entropy(logits, y);
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index argmax = 0;
        logits.row(i).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == y[i]) ++eval.correct;
    }
    if (!want_grads) return eval;

    const Eigen::Index batch = x.rows();
    // softmax - onehot, averaged over the batch
    Eigen::MatrixXd dlogits(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        Eigen::RowVectorXd e = (logits.row(i).array() - m).exp();
        dlogits.row(i) = e / e.sum();
        dlogits(i, y[i]) -= 1.0;
    }
    dlogits /= static_cast<double>(batch);

    const int d = model.dim;
    eval.grads.coeffs.resize(model.layers.size());
    eval.grads.bias.resize(model.layers.size());
    eval.grads.basis = Eigen::MatrixXd::Zero(d, d);

    Eigen::MatrixXd da = dlogits;
    for (int layer = static_cast<int>(model.layers.size()) - 1; layer >= 0;
         --layer) {
        const auto& lp = model.layers[static_cast<size_t>(layer)];
        const auto& cache = caches[static_cast<size_t>(layer)];

        const Eigen::MatrixXd dw = da.transpose() * cache.x_in;  // n x fan_in
        eval.grads.bias[static_cast<size_t>(layer)] =
            da.colwise().sum().transpose();

        // Through the basis combination: per partition,
        // dC_j = dW_j * B_j^T and dB_j += C_j^T * dW_j.
        Eigen::MatrixXd dc(lp.coeffs.rows(), lp.coeffs.cols());
        const long long fan_in = lp.shape.flat_len();
        for (int j = 0; j < lp.partitions; ++j) {
            const long long begin = static_cast<long long>(j) * d;
            const int len =
                static_cast<int>(std::min<long long>(d, fan_in - begin));
            const auto dw_block = dw.middleCols(begin, len);
            dc.middleCols(begin, d) =
                dw_block * model.basis.leftCols(len).transpose();
            eval.grads.basis.leftCols(len) +=
                cache.cq.middleCols(begin, d).transpose() * dw_block;
        }
        if (quantized) {
            // Straight-through: identity inside the clamp range, zero outside.
            dc = (lp.coeffs.cwiseAbs().array() <= cache.scale)
                     .select(dc, Eigen::MatrixXd::Zero(dc.rows(), dc.cols()));
            if (beta > 0.0) {
                // Popcount surrogate: the exact bit-extraction has zero
                // gradient almost everywhere, so the regularizer descends a
                // magnitude proxy that shrinks codes toward zero (fewer set
                // bits). Slope N/2 per unit scale.
                dc.array() += beta * model.coeff_bits / (2.0 * cache.scale) *
                              lp.coeffs.array().sign();
            }
        }
        eval.grads.coeffs[static_cast<size_t>(layer)] = std::move(dc);

        if (layer > 0) {
            const auto& prev = caches[static_cast<size_t>(layer - 1)];
            Eigen::MatrixXd dh = da * cache.weights;
            da = (prev.pre.array() > 0.0).select(dh, 0.0);
        }
    }
    return eval;
}

}  // namespace

Gradients analytic_gradients(const TrainableModel& model,
                             const Eigen::MatrixXd& x,
                             const Eigen::VectorXi& y, bool quantized,
                             double beta) {
    return eval_batch(model, x, y, quantized, beta, true).grads;
}

TrainResult train(TrainableModel model, const Dataset& data,
                  const TrainerConfig& cfg) {
    cfg.validate();
    if (data.x.rows() != data.y.size() || data.x.rows() < 1) {
        throw DataError("dataset is empty or inconsistent");
    }

    TrainResult result;
    std::vector<int> order(static_cast<size_t>(data.x.rows()));
    std::iota(order.begin(), order.end(), 0);

    for (int t_i = 1; t_i <= cfg.epochs; ++t_i) {
        const Phase phase = phase_for_epoch(t_i, cfg.t_coeffs, cfg.t_basis);
        const double eta =
            phase == Phase::Coefficients ? cfg.eta_coeffs : cfg.eta_basis;
        model.phase = phase;

        std::mt19937_64 shuffle_rng(
            hash_combine(cfg.seed, static_cast<uint64_t>(t_i)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double ce_sum = 0.0;
        int correct = 0;
        int batches = 0;
        double coeff_norm_sq = 0.0;
        double basis_norm_sq = 0.0;
        for (size_t begin = 0; begin < order.size();
             begin += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(
                order.size(), begin + static_cast<size_t>(cfg.batch_size));
            const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
            Eigen::MatrixXd xb(rows, data.x.cols());
            Eigen::VectorXi yb(rows);
            for (Eigen::Index r = 0; r < rows; ++r) {
                xb.row(r) = data.x.row(order[begin + static_cast<size_t>(r)]);
                yb[r] = data.y[order[begin + static_cast<size_t>(r)]];
            }

            const BatchEval eval = eval_batch(model, xb, yb, /*quantized=*/true,
                                              cfg.beta, /*want_grads=*/true);
            if (!std::isfinite(eval.ce)) {
                throw DataError("training diverged: non-finite loss at epoch " +
                                std::to_string(t_i) + ", batch " +
                                std::to_string(batches));
            }
            ce_sum += eval.ce;
            correct += eval.correct;
            ++batches;

            if (phase == Phase::Coefficients) {
                for (size_t layer = 0; layer < model.layers.size(); ++layer) {
                    auto& lp = model.layers[layer];
                    lp.coeffs -= eta * eval.grads.coeffs[layer];
                    lp.bias -= eta * eval.grads.bias[layer];
                    coeff_norm_sq +=
                        eta * eta * eval.grads.coeffs[layer].squaredNorm();
                    coeff_norm_sq +=
                        eta * eta * eval.grads.bias[layer].squaredNorm();
                }
            } else {
                model.basis -= eta * eval.grads.basis;
                basis_norm_sq += eta * eta * eval.grads.basis.squaredNorm();
            }
        }

        EpochStats stats;
        stats.epoch = t_i;
        stats.phase = phase;
        stats.accuracy =
            static_cast<double>(correct) / static_cast<double>(order.size());
        stats.mean_popcount = model.mean_popcount();
        stats.orthogonality_error = model.orthogonality_error();
        stats.coeff_update_norm = std::sqrt(coeff_norm_sq);
        stats.basis_update_norm = std::sqrt(basis_norm_sq);

        double reg = 0.0;
        if (cfg.beta > 0.0) {
            long long total_bits = 0;
            for (size_t layer = 0; layer < model.layers.size(); ++layer) {
                for (int16_t v :
                     model.layer_codes(static_cast<int>(layer)).raw()) {
                    total_bits += popcount_code(v, model.coeff_bits);
                }
            }
            reg = cfg.beta * static_cast<double>(total_bits);
        }
        stats.loss = ce_sum / std::max(1, batches) + reg;
        result.history.push_back(stats);
    }
    result.model = std::move(model);
    return result;
}

TrainableModel finetune_init(const std::vector<Eigen::MatrixXd>& weights,
                             const std::vector<Eigen::VectorXd>& biases,
                             const std::vector<LayerShape>& shapes,
                             const BasisMatrix& basis,
                             const TrainerConfig& cfg) {
    if (weights.size() != shapes.size() ||
        (!biases.empty() && biases.size() != shapes.size())) {
        throw DimensionError("layer count mismatch in finetune_init");
    }
    TrainableModel model;
    model.dim = basis.dim();
    model.coeff_bits = cfg.coeff_bits;
    model.basis = basis.rows();
    for (size_t layer = 0; layer < weights.size(); ++layer) {
        const auto& shape = shapes[layer];
        LayerParams lp;
        lp.shape = shape;
        lp.partitions = static_cast<int>(
            (shape.flat_len() + basis.dim() - 1) / basis.dim());
        lp.coeffs = real_coefficients(weights[layer], shape, basis);
        if (!biases.empty() && biases[layer].size() > 0) {
            if (biases[layer].size() != shape.n) {
                throw DimensionError("bias length does not match kernel count");
            }
            lp.bias = biases[layer];
        } else {
            lp.bias = Eigen::VectorXd::Zero(shape.n);
        }
        model.layers.push_back(std::move(lp));
    }
    return model;
}

double evaluate_accuracy(const TrainableModel& model, const Dataset& data,
                         std::optional<int> cell_bits) {
    Eigen::MatrixXd logits;
    if (cell_bits.has_value()) {
        const Eigen::MatrixXd cell_image =
            quantize_cells(model.basis, *cell_bits);
        logits = forward(model, data.x, /*quantized=*/true, &cell_image);
    } else {
        logits = forward(model, data.x, /*quantized=*/true);
    }
    int correct = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index argmax = 0;
        logits.row(i).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == data.y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

FloatMlp train_float_mlp(const Dataset& data, int hidden, int epochs,
                         double eta, int batch_size, uint64_t seed) {
    const int input_dim = static_cast<int>(data.x.cols());
    const int classes = data.classes;

    std::vector<std::pair<int, int>> sizes;
    if (hidden > 0) {
        sizes = {{hidden, input_dim}, {classes, hidden}};
    } else {
        sizes = {{classes, input_dim}};
    }

    FloatMlp mlp;
    std::mt19937_64 rng(hash_combine(seed, 0x666c74ull));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& [fan_out, fan_in] : sizes) {
        Eigen::MatrixXd w(fan_out, fan_in);
        const double std_dev = std::sqrt(2.0 / fan_in);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = std_dev * gauss(rng);
            }
        }
        mlp.weights.push_back(std::move(w));
        mlp.bias.push_back(Eigen::VectorXd::Zero(fan_out));
    }

    std::vector<int> order(static_cast<size_t>(data.x.rows()));
    std::iota(order.begin(), order.end(), 0);
    for (int t_i = 1; t_i <= epochs; ++t_i) {
        std::mt19937_64 shuffle_rng(
            hash_combine(seed, static_cast<uint64_t>(t_i)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (size_t begin = 0; begin < order.size();
             begin += static_cast<size_t>(batch_size)) {
            const size_t end =
                std::min(order.size(), begin + static_cast<size_t>(batch_size));
            const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
            Eigen::MatrixXd xb(rows, data.x.cols());
            Eigen::VectorXi yb(rows);
            for (Eigen::Index r = 0; r < rows; ++r) {
                xb.row(r) = data.x.row(order[begin + static_cast<size_t>(r)]);
                yb[r] = data.y[order[begin + static_cast<size_t>(r)]];
            }

            // forward
            std::vector<Eigen::MatrixXd> pre(mlp.weights.size());
            Eigen::MatrixXd h = xb;
            for (size_t layer = 0; layer < mlp.weights.size(); ++layer) {
                pre[layer] = (h * mlp.weights[layer].transpose()).rowwise() +
                             mlp.bias[layer].transpose();
                h = layer + 1 < mlp.weights.size() ? pre[layer].cwiseMax(0.0)
                                                   : pre[layer];
            }
            // backward
            Eigen::MatrixXd da(h.rows(), h.cols());
            for (Eigen::Index i = 0; i < h.rows(); ++i) {
                const double m = h.row(i).maxCoeff();
                Eigen::RowVectorXd e = (h.row(i).array() - m).exp();
                da.row(i) = e / e.sum();
                da(i, yb[i]) -= 1.0;
            }
            da /= static_cast<double>(rows);
            for (int layer = static_cast<int>(mlp.weights.size()) - 1;
                 layer >= 0; --layer) {
                const Eigen::MatrixXd& x_in =
                    layer == 0 ? xb
                               : pre[static_cast<size_t>(layer - 1)]
                                     .cwiseMax(0.0)
                                     .eval();
                const Eigen::MatrixXd dw = da.transpose() * x_in;
                const Eigen::VectorXd db = da.colwise().sum().transpose();
                if (layer > 0) {
                    Eigen::MatrixXd dh =
                        da * mlp.weights[static_cast<size_t>(layer)];
                    da = (pre[static_cast<size_t>(layer - 1)].array() > 0.0)
                             .select(dh, 0.0);
                }
                mlp.weights[static_cast<size_t>(layer)] -= eta * dw;
                mlp.bias[static_cast<size_t>(layer)] -= eta * db;
            }
        }
    }
    return mlp;
}

double evaluate_accuracy(const FloatMlp& mlp, const Dataset& data) {
    Eigen::MatrixXd h = data.x;
    for (size_t layer = 0; layer < mlp.weights.size(); ++layer) {
        Eigen::MatrixXd pre = (h * mlp.weights[layer].transpose()).rowwise() +
                              mlp.bias[layer].transpose();
        h = layer + 1 < mlp.weights.size() ? pre.cwiseMax(0.0) : pre;
    }
    int correct = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        Eigen::Index argmax = 0;
        h.row(i).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == data.y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(h.rows());
}

}  // namespace basisn
