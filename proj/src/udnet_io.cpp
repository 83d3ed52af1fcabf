#include "uwaeq/udnet.hpp"

#include "binio.hpp"

#include <zlib.h>

#include <algorithm>

namespace uwaeq {
namespace {

constexpr char kModelMagic[4] = {'U', 'D', 'N', '1'};
constexpr std::uint32_t kModelVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; checkpoints can exceed that in principle
    while (n > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
        crc = crc32(crc, data, chunk);
        data += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

template <typename M>
void write_matrix(detail::ByteWriter& out, const Eigen::DenseBase<M>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.f64(m(r, c));
}

template <typename M>
void read_matrix(detail::ByteReader& in, Eigen::DenseBase<M>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.f64();
}

}  // namespace

void save_model(const UdnetModel& model, const std::filesystem::path& path) {
    model.validate();
    detail::ByteWriter out;
    out.bytes(kModelMagic, 4);
    out.u32(kModelVersion);
    out.u32(static_cast<std::uint32_t>(model.layer_count()));
    out.u32(static_cast<std::uint32_t>(model.block_size));
    out.u32(static_cast<std::uint32_t>(model.hidden_dim));
    for (const auto& l : model.layers) {
        out.f64(l.lambda1);
        out.f64(l.lambda2);
        write_matrix(out, l.w1);
        write_matrix(out, l.b1);
        write_matrix(out, l.w2);
        write_matrix(out, l.b2);
    }
    const auto crc = crc_of(out.data().data(), out.data().size());
    out.u32(crc);
    detail::write_file(path.string(), out.data());
}

UdnetModel load_model(const std::filesystem::path& path) {
    const std::string name = path.string();
    const auto buf = detail::read_file(name);
    detail::ByteReader in(buf, name);
    char magic[4];
    in.bytes(magic, 4);
    if (!std::equal(magic, magic + 4, kModelMagic)) throw FormatError(name + ": not a UDN1 checkpoint (bad magic)");
    const auto version = in.u32();
    if (version != kModelVersion) throw FormatError(name + ": unsupported checkpoint version " + std::to_string(version));
    const std::size_t layers = in.u32();
    const std::size_t b = in.u32();
    const std::size_t hidden = in.u32();
    if (layers == 0 || b == 0 || hidden == 0)
        throw FormatError(name + ": header declares M=" + std::to_string(layers) + ", B=" + std::to_string(b) +
                          ", hidden=" + std::to_string(hidden));

    const std::size_t per_layer = 2 + hidden * 6 * b + hidden + 4 * b * hidden + 4 * b;
    const std::size_t expected = kHeaderBytes + layers * per_layer * 8 + 4;
    if (buf.size() != expected)
        throw FormatError(name + ": header (M=" + std::to_string(layers) + ", B=" + std::to_string(b) +
                          ", hidden=" + std::to_string(hidden) + ") implies " + std::to_string(expected) +
                          " bytes, file has " + std::to_string(buf.size()));
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(buf[expected - 4 + i]) << (8 * i);
    if (crc_of(buf.data(), expected - 4) != stored) throw FormatError(name + ": checksum mismatch, file is corrupt");

    UdnetModel model;
    model.block_size = b;
    model.hidden_dim = hidden;
    for (std::size_t m = 0; m < layers; ++m) {
        LayerParams l = LayerParams::zeros(b, hidden);
        l.lambda1 = in.f64();
        l.lambda2 = in.f64();
        read_matrix(in, l.w1);
        read_matrix(in, l.b1);
        read_matrix(in, l.w2);
        read_matrix(in, l.b2);
        model.layers.push_back(std::move(l));
    }
    model.validate();
    return model;
}

}  // namespace uwaeq
