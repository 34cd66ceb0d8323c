#include "basisn/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "basisn/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need swaps");

namespace basisn::io {

using nlohmann::json;

uint64_t fnv1a64(std::string_view data) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

json parse_json_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw ParseError("'" + path.string() + "' is not valid JSON");
    }
    return doc;
}

void check_size(const std::filesystem::path& path, size_t actual,
                size_t expected) {
    if (actual != expected) {
        throw ParseError("'" + path.string() + "': expected " +
                         std::to_string(expected) + " bytes, found " +
                         std::to_string(actual) +
                         " (truncated or mismatched tensor)");
    }
}

constexpr char kBasisMagic[4] = {'B', 'S', 'N', '1'};

}  // namespace

void save_basis(const std::filesystem::path& path, const BasisMatrix& basis) {
    const int d = basis.dim();
    std::string out;
    out.reserve(16 + static_cast<size_t>(d) * d * sizeof(double));
    out.append(kBasisMagic, 4);
    const uint32_t dim32 = static_cast<uint32_t>(d);
    const uint32_t cell32 = static_cast<uint32_t>(basis.cell_bits());
    const uint32_t reserved = 0;
    out.append(reinterpret_cast<const char*>(&dim32), 4);
    out.append(reinterpret_cast<const char*>(&cell32), 4);
    out.append(reinterpret_cast<const char*>(&reserved), 4);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            const double v = basis.rows()(r, c);
            out.append(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    }
    write_atomic(path, out);
}

BasisMatrix load_basis(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kBasisMagic, 4) != 0) {
        throw ParseError("'" + path.string() +
                         "' is not a basis container (bad magic or header "
                         "shorter than 16 bytes)");
    }
    uint32_t dim32 = 0;
    uint32_t cell32 = 0;
    std::memcpy(&dim32, data.data() + 4, 4);
    std::memcpy(&cell32, data.data() + 8, 4);
    if (dim32 == 0 || dim32 > 1u << 20) {
        throw ParseError("'" + path.string() + "': implausible dimension " +
                         std::to_string(dim32));
    }
    const size_t expected =
        16 + static_cast<size_t>(dim32) * dim32 * sizeof(double);
    check_size(path, data.size(), expected);

    const int d = static_cast<int>(dim32);
    Eigen::MatrixXd rows(d, d);
    size_t offset = 16;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            double v = 0;
            std::memcpy(&v, data.data() + offset, sizeof(double));
            rows(r, c) = v;
            offset += sizeof(double);
        }
    }
    return BasisMatrix(std::move(rows), static_cast<int>(cell32));
}

std::string basis_debug_json(const BasisMatrix& basis) {
    json doc;
    doc["dim"] = basis.dim();
    doc["cell_bits"] = basis.cell_bits();
    doc["orthogonality_error"] = basis.orthogonality_error();
    json rows = json::array();
    for (int r = 0; r < basis.dim(); ++r) {
        json row = json::array();
        for (int c = 0; c < basis.dim(); ++c) {
            row.push_back(basis.rows()(r, c));
        }
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2);
}

void write_f64(const std::filesystem::path& path, const double* data,
               size_t count) {
    write_atomic(path,
                 std::string_view(reinterpret_cast<const char*>(data),
                                  count * sizeof(double)));
}

std::vector<double> read_f64(const std::filesystem::path& path, size_t count) {
    const std::string data = read_file(path);
    check_size(path, data.size(), count * sizeof(double));
    std::vector<double> out(count);
    std::memcpy(out.data(), data.data(), data.size());
    return out;
}

void write_i16(const std::filesystem::path& path, const int16_t* data,
               size_t count) {
    write_atomic(path,
                 std::string_view(reinterpret_cast<const char*>(data),
                                  count * sizeof(int16_t)));
}

std::vector<int16_t> read_i16(const std::filesystem::path& path, size_t count) {
    const std::string data = read_file(path);
    check_size(path, data.size(), count * sizeof(int16_t));
    std::vector<int16_t> out(count);
    std::memcpy(out.data(), data.data(), data.size());
    return out;
}

namespace {

LayerShape shape_from_json(const json& obj, const std::string& context) {
    for (const char* key : {"n", "t", "w", "h"}) {
        if (!obj.contains(key) || !obj[key].is_number_integer()) {
            throw ParseError(context + ": layer entry needs integer fields "
                             "n, t, w, h");
        }
    }
    LayerShape shape{obj["n"].get<int>(), obj["t"].get<int>(),
                     obj["w"].get<int>(), obj["h"].get<int>()};
    try {
        shape.validate();
    } catch (const Error& e) {
        throw ParseError(context + ": " + e.what());
    }
    return shape;
}

json shape_to_json(const LayerShape& shape) {
    return json{{"n", shape.n}, {"t", shape.t}, {"w", shape.w}, {"h", shape.h}};
}

json meta_to_json(const FileMeta& meta) {
    return json{{"tool_version", meta.tool_version},
                {"config_hash", meta.config_hash}};
}

}  // namespace

NetworkSpec load_network_spec(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    NetworkSpec net;
    net.name = path.stem().string();

    const json* layers = nullptr;
    if (doc.is_array()) {
        layers = &doc;
    } else if (doc.is_object() && doc.contains("layers") &&
               doc["layers"].is_array()) {
        layers = &doc["layers"];
        if (doc.contains("name")) net.name = doc["name"].get<std::string>();
        if (doc.contains("dataset")) {
            net.dataset = doc["dataset"].get<std::string>();
        }
    } else {
        throw ParseError("'" + path.string() +
                         "': expected a JSON array of layers");
    }
    for (const auto& entry : *layers) {
        net.layers.push_back(shape_from_json(entry, path.string()));
    }
    net.validate();
    return net;
}

std::string network_spec_json(const NetworkSpec& net) {
    json layers = json::array();
    for (const auto& shape : net.layers) layers.push_back(shape_to_json(shape));
    return layers.dump(2) + "\n";
}

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt,
                     const FileMeta& meta) {
    std::filesystem::create_directories(dir);
    save_basis(dir / "basis.bsn", BasisMatrix(ckpt.basis_rows, ckpt.cell_bits));

    json manifest;
    manifest["format"] = "basisn-checkpoint";
    manifest["version"] = 1;
    manifest["meta"] = meta_to_json(meta);
    manifest["dim"] = ckpt.dim;
    manifest["coeff_bits"] = ckpt.coeff_bits;
    manifest["cell_bits"] = ckpt.cell_bits;
    manifest["basis_file"] = "basis.bsn";

    json layers = json::array();
    for (size_t i = 0; i < ckpt.layers.size(); ++i) {
        const auto& layer = ckpt.layers[i];
        const std::string codes_file = "layer" + std::to_string(i) + ".codes";
        const std::string bias_file = "layer" + std::to_string(i) + ".bias";
        write_i16(dir / codes_file, layer.codes.data(), layer.codes.size());
        write_f64(dir / bias_file, layer.bias.data(),
                  static_cast<size_t>(layer.bias.size()));
        json entry;
        entry["name"] = layer.name;
        entry["shape"] = shape_to_json(layer.shape);
        entry["partitions"] = layer.partitions;
        entry["scale"] = layer.scale;
        entry["codes_file"] = codes_file;
        entry["bias_file"] = bias_file;
        layers.push_back(std::move(entry));
    }
    manifest["layers"] = std::move(layers);
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    const json manifest = parse_json_file(manifest_path);
    if (!manifest.is_object() ||
        manifest.value("format", "") != "basisn-checkpoint") {
        throw ParseError("'" + manifest_path.string() +
                         "' is not a checkpoint manifest");
    }
    Checkpoint ckpt;
    ckpt.dim = manifest.at("dim").get<int>();
    ckpt.coeff_bits = manifest.at("coeff_bits").get<int>();
    ckpt.cell_bits = manifest.at("cell_bits").get<int>();

    const BasisMatrix basis =
        load_basis(dir / manifest.at("basis_file").get<std::string>());
    if (basis.dim() != ckpt.dim) {
        throw ParseError("checkpoint basis dimension " +
                         std::to_string(basis.dim()) +
                         " does not match manifest dim " +
                         std::to_string(ckpt.dim));
    }
    ckpt.basis_rows = basis.rows();

    for (const auto& entry : manifest.at("layers")) {
        CheckpointLayer layer;
        layer.name = entry.at("name").get<std::string>();
        layer.shape = shape_from_json(entry.at("shape"), manifest_path.string());
        layer.partitions = entry.at("partitions").get<int>();
        layer.scale = entry.at("scale").get<double>();
        const size_t code_count = static_cast<size_t>(layer.shape.n) *
                                  layer.partitions * ckpt.dim;
        layer.codes = read_i16(dir / entry.at("codes_file").get<std::string>(),
                               code_count);
        const auto bias = read_f64(
            dir / entry.at("bias_file").get<std::string>(),
            static_cast<size_t>(layer.shape.n));
        layer.bias = Eigen::Map<const Eigen::VectorXd>(
            bias.data(), static_cast<Eigen::Index>(bias.size()));
        ckpt.layers.push_back(std::move(layer));
    }
    return ckpt;
}

void save_weights(const std::filesystem::path& dir, const WeightsFile& weights,
                  const FileMeta& meta) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["format"] = "basisn-weights";
    manifest["version"] = 1;
    manifest["meta"] = meta_to_json(meta);
    json layers = json::array();
    for (size_t i = 0; i < weights.layers.size(); ++i) {
        const auto& layer = weights.layers[i];
        const std::string data_file = "layer" + std::to_string(i) + ".f64";
        // Row-major on disk.
        std::vector<double> buf(
            static_cast<size_t>(layer.weights2d.rows()) *
            layer.weights2d.cols());
        for (Eigen::Index r = 0; r < layer.weights2d.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights2d.cols(); ++c) {
                buf[static_cast<size_t>(r) * layer.weights2d.cols() + c] =
                    layer.weights2d(r, c);
            }
        }
        write_f64(dir / data_file, buf.data(), buf.size());

        json entry;
        entry["name"] = layer.name;
        entry["shape"] = shape_to_json(layer.shape);
        entry["data_file"] = data_file;
        if (layer.bias.size() > 0) {
            const std::string bias_file = "layer" + std::to_string(i) + ".bias";
            write_f64(dir / bias_file, layer.bias.data(),
                      static_cast<size_t>(layer.bias.size()));
            entry["bias_file"] = bias_file;
        }
        layers.push_back(std::move(entry));
    }
    manifest["layers"] = std::move(layers);
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

WeightsFile load_weights(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    const json manifest = parse_json_file(manifest_path);
    if (!manifest.is_object() ||
        manifest.value("format", "") != "basisn-weights") {
        throw ParseError("'" + manifest_path.string() +
                         "' is not a weights manifest");
    }
    WeightsFile weights;
    for (const auto& entry : manifest.at("layers")) {
        WeightsLayer layer;
        layer.name = entry.at("name").get<std::string>();
        layer.shape = shape_from_json(entry.at("shape"), manifest_path.string());
        const long long cols = layer.shape.flat_len();
        const auto buf =
            read_f64(dir / entry.at("data_file").get<std::string>(),
                     static_cast<size_t>(layer.shape.n) * cols);
        layer.weights2d.resize(layer.shape.n, cols);
        for (int r = 0; r < layer.shape.n; ++r) {
            for (long long c = 0; c < cols; ++c) {
                layer.weights2d(r, c) = buf[static_cast<size_t>(r) * cols + c];
            }
        }
        if (entry.contains("bias_file")) {
            const auto bias =
                read_f64(dir / entry.at("bias_file").get<std::string>(),
                         static_cast<size_t>(layer.shape.n));
            layer.bias = Eigen::Map<const Eigen::VectorXd>(
                bias.data(), static_cast<Eigen::Index>(bias.size()));
        }
        weights.layers.push_back(std::move(layer));
    }
    return weights;
}

void save_inputs(const std::filesystem::path& dir, const Eigen::MatrixXd& x,
                 const FileMeta& meta) {
    std::filesystem::create_directories(dir);
    std::vector<double> buf(static_cast<size_t>(x.rows()) * x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            buf[static_cast<size_t>(r) * x.cols() + c] = x(r, c);
        }
    }
    write_f64(dir / "inputs.f64", buf.data(), buf.size());
    json manifest;
    manifest["format"] = "basisn-inputs";
    manifest["meta"] = meta_to_json(meta);
    manifest["rows"] = static_cast<long long>(x.rows());
    manifest["cols"] = static_cast<long long>(x.cols());
    manifest["data_file"] = "inputs.f64";
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Eigen::MatrixXd load_inputs(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.json";
    const json manifest = parse_json_file(manifest_path);
    if (!manifest.is_object() ||
        manifest.value("format", "") != "basisn-inputs") {
        throw ParseError("'" + manifest_path.string() +
                         "' is not an inputs manifest");
    }
    const long long rows = manifest.at("rows").get<long long>();
    const long long cols = manifest.at("cols").get<long long>();
    if (rows <= 0 || cols <= 0) {
        throw ParseError("inputs manifest has non-positive dimensions");
    }
    const auto buf =
        read_f64(dir / manifest.at("data_file").get<std::string>(),
                 static_cast<size_t>(rows) * static_cast<size_t>(cols));
    Eigen::MatrixXd x(rows, cols);
    for (long long r = 0; r < rows; ++r) {
        for (long long c = 0; c < cols; ++c) {
            x(r, c) = buf[static_cast<size_t>(r) * cols + c];
        }
    }
    return x;
}

std::string schedule_json(const Schedule& schedule, const FileMeta& meta) {
    json doc;
    doc["meta"] = meta_to_json(meta);
    doc["dim"] = schedule.dim();
    doc["coeff_bits"] = schedule.coeff_bits();
    doc["tg_groups"] = schedule.tg_groups();
    doc["num_crossbars"] = schedule.num_crossbars();
    doc["total_cycles"] = schedule.total_cycles();

    json cycles = json::array();
    for (const auto& cycle : schedule.explicit_cycles()) {
        json entries = json::array();
        for (const auto& entry : cycle.entries) {
            entries.push_back(json{{"crossbar", entry.crossbar},
                                   {"layer", entry.layer},
                                   {"kernel", entry.kernel},
                                   {"partition", entry.partition},
                                   {"plane", entry.plane},
                                   {"mask", entry.mask.to_hex()}});
        }
        cycles.push_back(std::move(entries));
    }
    doc["cycles"] = std::move(cycles);
    return doc.dump(2) + "\n";
}

CsvWriter::CsvWriter(const FileMeta& meta) {
    out_ += "# tool_version " + meta.tool_version + "\r\n";
    out_ += "# config_hash " + meta.config_hash + "\r\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    emit(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) { emit(fields); }

void CsvWriter::emit(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out_ += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") != std::string::npos) {
            out_ += '"';
            for (char c : f) {
                if (c == '"') out_ += '"';
                out_ += c;
            }
            out_ += '"';
        } else {
            out_ += f;
        }
    }
    out_ += "\r\n";
}

void CsvWriter::save(const std::filesystem::path& path) const {
    write_atomic(path, out_);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace basisn::io
