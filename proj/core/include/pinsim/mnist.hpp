#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pinsim/rbm.hpp"

namespace pinsim {

enum class Split { Train, Test };

/// Grayscale images as read from IDX files.
struct GrayDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<std::uint8_t>> images;
    std::vector<int> labels;
    Split split = Split::Train;

    std::size_t size() const { return labels.size(); }
};

struct LabeledDataset {
    std::vector<BinaryState> images;
    std::vector<int> labels;
    Split split = Split::Train;

    std::size_t size() const { return labels.size(); }
    TrainingSet view(std::size_t count) const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 2051;
inline constexpr std::uint32_t kIdxLabelsMagic = 2049;

/// Reads an IDX image/label pair. `limit` caps the number of items read
/// (0 = all). Throws DataError on bad magic, truncation or count mismatch.
GrayDataset load_mnist_idx(const std::filesystem::path& images_path,
                           const std::filesystem::path& labels_path, Split split, std::size_t limit = 0);

/// pixel -> 1 iff value > threshold.
LabeledDataset binarize(const GrayDataset& data, int threshold = 127);

struct MnistPaths {
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;

    /// Standard file names inside `dir`.
    static MnistPaths in_directory(const std::filesystem::path& dir);
};

}  // namespace pinsim
