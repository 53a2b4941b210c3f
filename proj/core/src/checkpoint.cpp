// SPDX-License-Identifier: Apache-2.0
#include "analogia/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "analogia/error.hpp"
#include "analogia/io.hpp"

namespace analogia {

std::string format_key_values(const KeyValues& kv) {
    std::ostringstream os;
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
    return os.str();
}

KeyValues parse_key_values(const std::string& text, const std::string& source) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError(source, lineno, "expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

namespace {

void append_le32(std::string& out, float value) {
    auto bits = std::bit_cast<std::uint32_t>(value);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

float read_le32(const std::string& in, std::size_t offset) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    return std::bit_cast<float>(bits);
}

std::size_t parse_count(std::string_view s, const std::string& source, std::size_t line) {
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(source, line, "bad integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void save_checkpoint(const std::string& dir, const Checkpoint& checkpoint) {
    namespace fs = std::filesystem;
    checkpoint.params.validate();
    fs::create_directories(dir);

    std::ostringstream manifest;
    std::string weights;
    for (const auto& [name, tensor] : checkpoint.params.named()) {
        manifest << name << '\t';
        if (tensor->rank() == 2) {
            manifest << tensor->rows() << ',' << tensor->cols();
        } else {
            manifest << tensor->rows();
        }
        manifest << '\t' << weights.size() << '\n';
        for (Real v : tensor->storage()) append_le32(weights, static_cast<float>(v));
    }

    KeyValues config = checkpoint.config;
    config["input_dim"] = std::to_string(checkpoint.params.input_dim);
    config["hidden"] = std::to_string(checkpoint.params.hidden);
    config["output_dim"] = std::to_string(checkpoint.params.output_dim());

    const fs::path base(dir);
    write_file_atomic((base / "weights.bin").string(), weights);
    write_file_atomic((base / "manifest.txt").string(), manifest.str());
    write_file_atomic((base / "config.txt").string(), format_key_values(config));
    write_file_atomic((base / "prototypes.tsv").string(), format_prototypes(checkpoint.prototypes));
}

Checkpoint load_checkpoint(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base(dir);
    if (!fs::is_directory(base)) throw ConfigError("checkpoint directory " + dir + " does not exist");

    Checkpoint out;
    const std::string config_path = (base / "config.txt").string();
    out.config = parse_key_values(read_file(config_path), config_path);
    auto required = [&](const char* key) {
        auto it = out.config.find(key);
        if (it == out.config.end()) throw ConfigError(config_path + ": missing key '" + key + "'");
        return parse_count(it->second, config_path, 0);
    };
    const std::size_t input_dim = required("input_dim");
    const std::size_t hidden = required("hidden");
    out.params = EncoderParams<Real>::zeros(input_dim, hidden);

    const std::string manifest_path = (base / "manifest.txt").string();
    const std::string weights_path = (base / "weights.bin").string();
    const std::string weights = read_file(weights_path);
    std::istringstream manifest(read_file(manifest_path));

    auto named = out.params.named();
    std::string line;
    std::size_t lineno = 0, index = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 3) throw ParseError(manifest_path, lineno, "expected name, shape and offset");
        if (index >= named.size()) throw ParseError(manifest_path, lineno, "more tensors than the encoder has");
        auto& [name, tensor] = named[index++];
        if (cols[0] != name) {
            throw ParseError(manifest_path, lineno, "expected tensor '" + name + "', found '" + std::string(cols[0]) + "'");
        }
        const auto dims = split(cols[1], ',');
        std::vector<std::size_t> shape;
        for (auto d : dims) shape.push_back(parse_count(d, manifest_path, lineno));
        if (shape != tensor->shape()) {
            throw ParseError(manifest_path, lineno, name + " has shape " + shape_string(shape) + ", expected " +
                                                        tensor->shape_string());
        }
        const std::size_t offset = parse_count(cols[2], manifest_path, lineno);
        if (offset + 4 * tensor->size() > weights.size()) {
            throw ParseError(manifest_path, lineno, name + " extends past the end of weights.bin");
        }
        for (std::size_t i = 0; i < tensor->size(); ++i) (*tensor)[i] = static_cast<Real>(read_le32(weights, offset + 4 * i));
    }
    if (index != named.size()) throw ParseError(manifest_path, lineno, "manifest lists too few tensors");

    const std::string proto_path = (base / "prototypes.tsv").string();
    out.prototypes = fs::exists(proto_path) ? parse_prototypes(read_file(proto_path), proto_path) : PrototypeSet{};
    return out;
}

}  // namespace analogia
