#include "pinsim/mnist.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "pinsim/error.hpp"

namespace pinsim {

namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw DataError("truncated IDX header in " + path.string());
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::ifstream open_idx(const std::filesystem::path& path, std::uint32_t magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    const std::uint32_t found = read_be32(in, path);
    if (found != magic)
        throw DataError(path.string() + ": IDX magic " + std::to_string(found) + ", expected " +
                        std::to_string(magic));
    return in;
}

}  // namespace

GrayDataset load_mnist_idx(const std::filesystem::path& images_path,
                           const std::filesystem::path& labels_path, Split split, std::size_t limit) {
    std::ifstream img = open_idx(images_path, kIdxImagesMagic);
    const std::uint32_t n_images = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);
    std::ifstream lab = open_idx(labels_path, kIdxLabelsMagic);
    const std::uint32_t n_labels = read_be32(lab, labels_path);
    if (n_images != n_labels)
        throw DataError("image count " + std::to_string(n_images) + " differs from label count " +
                        std::to_string(n_labels));
    if (rows == 0 || cols == 0) throw DataError(images_path.string() + ": empty image dimensions");

    const std::size_t n = limit ? std::min<std::size_t>(limit, n_images) : n_images;
    GrayDataset d;
    d.rows = rows;
    d.cols = cols;
    d.split = split;
    d.images.assign(n, std::vector<std::uint8_t>(std::size_t{rows} * cols));
    d.labels.resize(n);
    std::vector<unsigned char> raw_labels(n);
    if (!lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n)))
        throw DataError("truncated label file " + labels_path.string());
    for (std::size_t i = 0; i < n; ++i) {
        if (!img.read(reinterpret_cast<char*>(d.images[i].data()),
                      static_cast<std::streamsize>(d.images[i].size())))
            throw DataError("truncated image file " + images_path.string());
        if (raw_labels[i] > 9) throw DataError("label out of range in " + labels_path.string());
        d.labels[i] = raw_labels[i];
    }
    return d;
}

LabeledDataset binarize(const GrayDataset& data, int threshold) {
    require(threshold >= 0 && threshold <= 255, "binarization threshold must lie in [0, 255]");
    LabeledDataset out;
    out.split = data.split;
    out.labels = data.labels;
    out.images.reserve(data.images.size());
    for (const auto& px : data.images) {
        Vector v(static_cast<Eigen::Index>(px.size()));
        for (std::size_t i = 0; i < px.size(); ++i) v[static_cast<Eigen::Index>(i)] = px[i] > threshold ? 1.0 : 0.0;
        out.images.emplace_back(std::move(v));
    }
    return out;
}

TrainingSet LabeledDataset::view(std::size_t count) const {
    require(count <= size(), "requested more samples than the dataset holds");
    return TrainingSet{std::span<const BinaryState>(images.data(), count),
                       std::span<const int>(labels.data(), count)};
}

MnistPaths MnistPaths::in_directory(const std::filesystem::path& dir) {
    return MnistPaths{dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
                      dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
}

}  // namespace pinsim
