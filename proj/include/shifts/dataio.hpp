#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shifts/tensor.hpp"

namespace shifts {

enum class Split { train, val, test };

const char* split_name(Split s);

/// Aligned exogenous matrix and univariate target with chronological split
/// bounds and train-fitted standardization statistics. Immutable by
/// convention: transforming operations return a new dataset.
struct SeriesDataset {
    std::vector<std::string> timestamps;  // empty when the file had no date column
    Eigen::MatrixXf X;                    // T x d_X
    Eigen::VectorXf Y;                    // T
    std::vector<std::string> channel_names;
    std::string target_name;
    long train_end = 0;
    long val_end = 0;
    // Per-channel train statistics, X channels first then Y. Filled by
    // standardize(); population (biased) standard deviation.
    std::vector<float> scale_mean, scale_std;

    long rows() const { return static_cast<long>(Y.size()); }
    int num_features() const { return static_cast<int>(X.cols()); }
    bool split_set() const { return val_end > 0; }
    bool standardized() const { return !scale_mean.empty(); }
    long segment_begin(Split s) const;
    long segment_end(Split s) const;
};

/// Parse a CSV with a header row. A first column named "date" (case
/// insensitive) or with non-numeric cells is captured as timestamps. The
/// target column may be given by name or as a numeric index into the
/// non-date columns.
SeriesDataset load_csv(const std::string& path, const std::string& target_column);

void write_csv(const SeriesDataset& ds, const std::string& path);

/// Set chronological split bounds from ratios (must sum to 1). When L and H
/// are given, every segment must fit at least one L+H window.
SeriesDataset chrono_split(SeriesDataset ds, std::array<double, 3> ratios, int L = 0, int H = 0);

/// Transform every channel to (v - mean_train) / std_train using statistics
/// of the train rows only. Rejects near-constant channels (std < 1e-8).
SeriesDataset standardize(SeriesDataset ds);

/// Inverse of standardize using the stored statistics.
SeriesDataset destandardize(SeriesDataset ds);

/// One batch of forecasting windows. Lookback rows end at each anchor t;
/// horizon rows are the H rows immediately after.
struct WindowBatch {
    Tensor X_L;  // [B, L, d_X]
    Tensor Y_L;  // [B, L, 1]
    Tensor X_H;  // [B, H, d_X]; undefined in inference-only batches
    Tensor Y_H;  // [B, H, 1];  undefined in inference-only batches
    std::vector<long> anchors;
    int size() const { return static_cast<int>(anchors.size()); }
};

/// Streams batches over all complete windows of one split segment. Val and
/// test streams are ordered and exhaustive; train streams may shuffle.
class WindowStream {
public:
    WindowStream(const SeriesDataset& ds, Split split, int L, int H, int batch_size, bool shuffle,
                 uint64_t seed);
    std::optional<WindowBatch> next();
    void reset() { pos_ = 0; }
    long window_count() const { return static_cast<long>(anchors_.size()); }

    /// Number of complete windows a segment of `len` rows supports.
    static long count_for_segment(long len, int L, int H);

private:
    const SeriesDataset* ds_;
    std::vector<long> anchors_;
    size_t pos_ = 0;
    int L_, H_, batch_;
};

/// Materialize one batch for the given anchors (lookback ends at anchor).
WindowBatch make_batch(const SeriesDataset& ds, const std::vector<long>& anchors, int L, int H,
                       bool with_horizon = true);

}  // namespace shifts
