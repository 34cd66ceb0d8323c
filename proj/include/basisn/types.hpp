#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace basisn {

// Error taxonomy. The CLI maps these categories onto process exit codes
// (1 config/usage, 2 data, 3 internal invariant), so new error types should
// derive from one of the three categories below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user input: malformed config, bad flag combination, bad argument.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Invalid data: unreadable or inconsistent files, shape mismatches.
class DataError : public Error {
public:
    using Error::Error;
};

// Violated internal invariant; indicates a bug, not a user mistake.
class InternalError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SingularBasisError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

// A schedule cycle asked one basis column to serve two kernels at once.
class ContestViolationError : public InternalError {
public:
    using InternalError::InternalError;
};

inline constexpr int kMinCellBits = 1;
inline constexpr int kMaxCellBits = 6;  // practical limit for multi-level RRAM cells
inline constexpr int kMinCoeffBits = 1;
inline constexpr int kMaxCoeffBits = 16;

// Condition-estimate ceiling before a basis counts as numerically singular.
inline constexpr double kConditionLimit = 1e8;

// Kernel tensor shape: n kernels, each of depth t, width w, height h.
// A layer flattens to a 2D matrix with n rows of length t*w*h.
struct LayerShape {
    int n = 0;
    int t = 0;
    int w = 0;
    int h = 0;

    long long flat_len() const { return static_cast<long long>(t) * w * h; }
    void validate() const;
};

// Ordered layer list for one network; `dataset` is carried as metadata only.
struct NetworkSpec {
    std::string name;
    std::string dataset;
    std::vector<LayerShape> layers;

    void validate() const;
    long long total_weights() const;
};

// Coefficient/cell quantizer settings. Rounding is half-away-from-zero and
// the coefficient range is set per layer from the max-abs real coefficient.
struct QuantizationConfig {
    int coeff_bits = 4;
    int cell_bits = 4;

    void validate() const;
};

// Crossbar platform description. Defaults mirror a fabricated chip with
// 48 crossbars of 256x256; tg_groups is the number of parallel TG sets
// wired to each crossbar's columns.
struct CrossbarConfig {
    int dim = 256;
    int num_crossbars = 48;
    int tg_groups = 4;
    int coeff_bits = 4;
    int cell_bits = 4;

    void validate() const;
};

}  // namespace basisn
