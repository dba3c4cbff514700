#include "shifts/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shifts {

namespace {

void write_f32_le(std::ostream& os, const float* v, int64_t n) {
    std::vector<unsigned char> buf(static_cast<size_t>(n) * 4);
    for (int64_t i = 0; i < n; ++i) {
        uint32_t u;
        std::memcpy(&u, &v[i], 4);
        buf[i * 4 + 0] = static_cast<unsigned char>(u & 0xff);
        buf[i * 4 + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
        buf[i * 4 + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
        buf[i * 4 + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_f32_le(std::istream& is, float* v, int64_t n) {
    std::vector<unsigned char> buf(static_cast<size_t>(n) * 4);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!is) throw IoError("checkpoint payload truncated");
    for (int64_t i = 0; i < n; ++i) {
        const uint32_t u = static_cast<uint32_t>(buf[i * 4 + 0]) |
                           (static_cast<uint32_t>(buf[i * 4 + 1]) << 8) |
                           (static_cast<uint32_t>(buf[i * 4 + 2]) << 16) |
                           (static_cast<uint32_t>(buf[i * 4 + 3]) << 24);
        std::memcpy(&v[i], &u, 4);
    }
}

std::string shape_csv(const Shape& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out;
}

Shape parse_shape_csv(const std::string& s) {
    Shape out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw IoError("checkpoint manifest has a malformed shape: " + s);
        }
    }
    if (out.empty()) throw IoError("checkpoint manifest has an empty shape");
    return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os << "shifts-checkpoint v1\n" << params.size() << "\n";
    for (const auto& p : params) os << p.name << " " << shape_csv(p.tensor.shape()) << " f32\n";
    for (const auto& p : params) write_f32_le(os, p.tensor.data(), p.tensor.size());
    if (!os) throw IoError("failed writing checkpoint: " + path);
}

std::vector<std::pair<std::string, Tensor>> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    std::string magic;
    std::getline(is, magic);
    if (magic != "shifts-checkpoint v1") throw IoError("not a shifts checkpoint: " + path);
    std::string count_line;
    std::getline(is, count_line);
    size_t count = 0;
    try {
        count = static_cast<size_t>(std::stoul(count_line));
    } catch (const std::exception&) {
        throw IoError("checkpoint manifest has a malformed count line");
    }
    std::vector<std::pair<std::string, Shape>> records;
    records.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        std::string line;
        if (!std::getline(is, line)) throw IoError("checkpoint manifest truncated");
        std::stringstream ss(line);
        std::string name, shape_s, dtype;
        if (!(ss >> name >> shape_s >> dtype) || dtype != "f32")
            throw IoError("checkpoint manifest has a malformed record: " + line);
        records.emplace_back(name, parse_shape_csv(shape_s));
    }
    std::vector<std::pair<std::string, Tensor>> out;
    out.reserve(count);
    for (auto& [name, shape] : records) {
        Tensor t(shape);
        read_f32_le(is, t.data(), t.size());
        out.emplace_back(name, std::move(t));
    }
    return out;
}

void load_checkpoint_into(const std::string& path, ParamSet& params) {
    auto records = load_checkpoint(path);
    if (records.size() != params.size())
        throw ValueError("checkpoint has " + std::to_string(records.size()) +
                         " parameters, model expects " + std::to_string(params.size()));
    for (auto& [name, tensor] : records) {
        Parameter& p = params.at(name);
        if (p.tensor.shape() != tensor.shape())
            throw ValueError("checkpoint shape mismatch for " + name + ": " +
                             shape_str(tensor.shape()) + " vs " + shape_str(p.tensor.shape()));
        p.tensor.copy_values_from(tensor);
    }
}

}  // namespace shifts
