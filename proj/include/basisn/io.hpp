#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "basisn/basis.hpp"
#include "basisn/linalg.hpp"
#include "basisn/schedule.hpp"
#include "basisn/types.hpp"

namespace basisn::io {

// Stable 64-bit content hash (FNV-1a); used for config fingerprints.
uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

// Write-then-rename so readers never observe partial files.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// --- basis container ------------------------------------------------------
// 16-byte header: magic "BSN1", u32 dim, u32 cell_bits, u32 reserved; then
// dim*dim little-endian f64, row-major (full-precision rows).
void save_basis(const std::filesystem::path& path, const BasisMatrix& basis);
BasisMatrix load_basis(const std::filesystem::path& path);
std::string basis_debug_json(const BasisMatrix& basis);

// --- raw tensors ----------------------------------------------------------
// Headerless little-endian payloads; shapes live in the owning manifest.
// Loaders check the exact byte count and report expected vs actual on
// mismatch.
void write_f64(const std::filesystem::path& path, const double* data,
               size_t count);
std::vector<double> read_f64(const std::filesystem::path& path, size_t count);
void write_i16(const std::filesystem::path& path, const int16_t* data,
               size_t count);
std::vector<int16_t> read_i16(const std::filesystem::path& path, size_t count);

// --- network specs --------------------------------------------------------
// A spec file is a JSON array of {"n","t","w","h"} layer objects (an object
// with a "layers" field is also accepted); the network name defaults to the
// file stem.
NetworkSpec load_network_spec(const std::filesystem::path& path);
std::string network_spec_json(const NetworkSpec& net);

// --- checkpoints ----------------------------------------------------------
// Directory with manifest.json, the basis container, and per-layer i16 code
// tensors (row-major (n, partitions, d)) plus f64 biases.
struct CheckpointLayer {
    std::string name;
    LayerShape shape;
    int partitions = 0;
    double scale = 0.0;
    std::vector<int16_t> codes;
    Eigen::VectorXd bias;
};

struct Checkpoint {
    int dim = 0;
    int coeff_bits = 0;
    int cell_bits = 0;
    Eigen::MatrixXd basis_rows;
    std::vector<CheckpointLayer> layers;
};

struct FileMeta {
    std::string tool_version;
    std::string config_hash;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt,
                     const FileMeta& meta);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// --- weights containers -----------------------------------------------------
// Same layout idea as checkpoints but with f64 weight tensors: the input
// format of the decompose command.
struct WeightsLayer {
    std::string name;
    LayerShape shape;
    Eigen::MatrixXd weights2d;  // n x (t*w*h)
    Eigen::VectorXd bias;       // may be empty
};

struct WeightsFile {
    std::vector<WeightsLayer> layers;
};

void save_weights(const std::filesystem::path& dir, const WeightsFile& weights,
                  const FileMeta& meta);
WeightsFile load_weights(const std::filesystem::path& dir);

// --- input batches ----------------------------------------------------------
// manifest {rows, cols, data_file} plus a f64 payload.
void save_inputs(const std::filesystem::path& dir, const Eigen::MatrixXd& x,
                 const FileMeta& meta);
Eigen::MatrixXd load_inputs(const std::filesystem::path& dir);

// --- schedules ---------------------------------------------------------------
std::string schedule_json(const Schedule& schedule, const FileMeta& meta);

// --- CSV ---------------------------------------------------------------------
// RFC-4180 records (CRLF, quoting when needed) preceded by a `#` comment
// block carrying the tool version and config hash.
class CsvWriter {
public:
    explicit CsvWriter(const FileMeta& meta);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& fields);
    const std::string& str() const { return out_; }
    void save(const std::filesystem::path& path) const;

private:
    void emit(const std::vector<std::string>& fields);
    std::string out_;
};

std::string format_double(double v);

}  // namespace basisn::io
