#include "shifts/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "shifts/rng.hpp"

namespace shifts {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

long SeriesDataset::segment_begin(Split s) const {
    if (!split_set()) throw ValueError("dataset has no split bounds; call chrono_split first");
    switch (s) {
        case Split::train: return 0;
        case Split::val: return train_end;
        case Split::test: return val_end;
    }
    return 0;
}

long SeriesDataset::segment_end(Split s) const {
    if (!split_set()) throw ValueError("dataset has no split bounds; call chrono_split first");
    switch (s) {
        case Split::train: return train_end;
        case Split::val: return val_end;
        case Split::test: return rows();
    }
    return 0;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

bool parse_float(const std::string& s, float& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc{}) return false;
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    return p == e && std::isfinite(out);
}

bool iequals(const std::string& a, const char* b) {
    size_t i = 0;
    for (; i < a.size() && b[i]; ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return i == a.size() && b[i] == '\0';
}

}  // namespace

SeriesDataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open data file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw ValueError(path + ": empty file, expected a header row");
    std::vector<std::string> header = split_line(line);
    if (header.size() < 2) throw ValueError(path + ": expected at least two columns");

    // Peek at the first data row to decide whether column 0 is a date column.
    std::vector<std::string> rows_raw;
    while (std::getline(is, line)) {
        if (!line.empty() && line.find_first_not_of(", \t\r") != std::string::npos)
            rows_raw.push_back(line);
    }
    if (rows_raw.empty()) throw ValueError(path + ": no data rows");

    bool has_date = iequals(header[0], "date") || iequals(header[0], "time") ||
                    iequals(header[0], "timestamp");
    if (!has_date) {
        float tmp;
        has_date = !parse_float(split_line(rows_raw[0])[0], tmp);
    }
    const int first_value_col = has_date ? 1 : 0;
    const int n_value_cols = static_cast<int>(header.size()) - first_value_col;
    if (n_value_cols < 2)
        throw ValueError(path + ": need a target column and at least one exogenous column");

    // Resolve the target among value columns, by name first, then as index.
    int target_idx = -1;
    for (int c = 0; c < n_value_cols; ++c) {
        if (header[first_value_col + c] == target_column) {
            target_idx = c;
            break;
        }
    }
    if (target_idx < 0) {
        int idx;
        auto [p, ec] = std::from_chars(target_column.data(),
                                       target_column.data() + target_column.size(), idx);
        if (ec == std::errc{} && p == target_column.data() + target_column.size() && idx >= 0 &&
            idx < n_value_cols) {
            target_idx = idx;
        }
    }
    if (target_idx < 0)
        throw ValueError(path + ": target column \"" + target_column + "\" not found");

    const long T = static_cast<long>(rows_raw.size());
    SeriesDataset ds;
    ds.X.resize(T, n_value_cols - 1);
    ds.Y.resize(T);
    ds.target_name = header[first_value_col + target_idx];
    for (int c = 0; c < n_value_cols; ++c) {
        if (c != target_idx) ds.channel_names.push_back(header[first_value_col + c]);
    }
    if (has_date) ds.timestamps.reserve(T);

    for (long r = 0; r < T; ++r) {
        std::vector<std::string> cells = split_line(rows_raw[r]);
        if (static_cast<int>(cells.size()) != static_cast<int>(header.size()))
            throw ValueError(path + ": row " + std::to_string(r + 2) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()));
        if (has_date) ds.timestamps.push_back(cells[0]);
        int xc = 0;
        for (int c = 0; c < n_value_cols; ++c) {
            float v;
            if (!parse_float(cells[first_value_col + c], v))
                throw ValueError(path + ": row " + std::to_string(r + 2) + ", column \"" +
                                 header[first_value_col + c] + "\": cannot parse \"" +
                                 cells[first_value_col + c] + "\" as a finite number");
            if (c == target_idx)
                ds.Y[r] = v;
            else
                ds.X(r, xc++) = v;
        }
    }
    return ds;
}

void write_csv(const SeriesDataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open file for writing: " + path);
    const bool dates = !ds.timestamps.empty();
    if (dates) os << "date,";
    for (const auto& n : ds.channel_names) os << n << ",";
    os << (ds.target_name.empty() ? "y" : ds.target_name) << "\n";
    char buf[64];
    for (long r = 0; r < ds.rows(); ++r) {
        if (dates) os << ds.timestamps[r] << ",";
        for (int c = 0; c < ds.num_features(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.8g", ds.X(r, c));
            os << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.8g", ds.Y[r]);
        os << buf << "\n";
    }
    if (!os) throw IoError("failed writing file: " + path);
}

SeriesDataset chrono_split(SeriesDataset ds, std::array<double, 3> ratios, int L, int H) {
    double sum = 0.0;
    for (double r : ratios) {
        if (r <= 0.0) throw ValueError("split ratios must be positive");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValueError("split ratios must sum to 1");
    const long T = ds.rows();
    ds.train_end = static_cast<long>(static_cast<double>(T) * ratios[0]);
    ds.val_end = static_cast<long>(static_cast<double>(T) * (ratios[0] + ratios[1]));
    if (ds.train_end <= 0 || ds.train_end >= ds.val_end || ds.val_end >= T)
        throw ValueError("degenerate split: bounds (" + std::to_string(ds.train_end) + ", " +
                         std::to_string(ds.val_end) + ") for " + std::to_string(T) + " rows");
    if (L > 0 && H > 0) {
        const long need = static_cast<long>(L) + H;
        const long seg[3] = {ds.train_end, ds.val_end - ds.train_end, T - ds.val_end};
        const char* names[3] = {"train", "val", "test"};
        for (int i = 0; i < 3; ++i) {
            if (seg[i] < need)
                throw ValueError("degenerate split: " + std::string(names[i]) + " segment has " +
                                 std::to_string(seg[i]) + " rows, a window needs L+H=" +
                                 std::to_string(need));
        }
    }
    return ds;
}

SeriesDataset standardize(SeriesDataset ds) {
    if (!ds.split_set()) throw ValueError("standardize: split bounds not set");
    const long n = ds.train_end;
    const int d = ds.num_features();
    ds.scale_mean.assign(d + 1, 0.0f);
    ds.scale_std.assign(d + 1, 0.0f);

    auto fit = [&](auto&& col, int slot, const std::string& name) {
        double m = 0.0;
        for (long r = 0; r < n; ++r) m += col(r);
        m /= static_cast<double>(n);
        double v = 0.0;
        for (long r = 0; r < n; ++r) {
            const double d2 = col(r) - m;
            v += d2 * d2;
        }
        const double sd = std::sqrt(v / static_cast<double>(n));
        if (sd < 1e-8)
            throw ValueError("standardize: channel \"" + name + "\" is constant on the train split");
        ds.scale_mean[slot] = static_cast<float>(m);
        ds.scale_std[slot] = static_cast<float>(sd);
    };
    for (int c = 0; c < d; ++c)
        fit([&](long r) { return ds.X(r, c); }, c, ds.channel_names[c]);
    fit([&](long r) { return ds.Y[r]; }, d, ds.target_name.empty() ? "target" : ds.target_name);

    for (int c = 0; c < d; ++c)
        ds.X.col(c) = (ds.X.col(c).array() - ds.scale_mean[c]) / ds.scale_std[c];
    ds.Y = (ds.Y.array() - ds.scale_mean[d]) / ds.scale_std[d];
    return ds;
}

SeriesDataset destandardize(SeriesDataset ds) {
    if (!ds.standardized()) throw ValueError("destandardize: dataset is not standardized");
    const int d = ds.num_features();
    for (int c = 0; c < d; ++c)
        ds.X.col(c) = ds.X.col(c).array() * ds.scale_std[c] + ds.scale_mean[c];
    ds.Y = ds.Y.array() * ds.scale_std[d] + ds.scale_mean[d];
    ds.scale_mean.clear();
    ds.scale_std.clear();
    return ds;
}

long WindowStream::count_for_segment(long len, int L, int H) {
    const long c = len - static_cast<long>(L) - H + 1;
    return c > 0 ? c : 0;
}

WindowStream::WindowStream(const SeriesDataset& ds, Split split, int L, int H, int batch_size,
                           bool shuffle, uint64_t seed)
    : ds_(&ds), L_(L), H_(H), batch_(batch_size) {
    if (L < 1 || H < 1) throw ValueError("window lengths must be positive");
    if (batch_size < 1) throw ValueError("batch size must be positive");
    const long b = ds.segment_begin(split);
    const long e = ds.segment_end(split);
    if (count_for_segment(e - b, L, H) <= 0)
        throw ValueError("degenerate split: " + std::string(split_name(split)) + " segment has " +
                         std::to_string(e - b) + " rows, a window needs L+H=" +
                         std::to_string(static_cast<long>(L) + H));
    // Anchor t = last lookback row; lookback [t-L+1, t], horizon [t+1, t+H].
    for (long t = b + L - 1; t + H <= e - 1; ++t) anchors_.push_back(t);
    if (shuffle) {
        Rng rng(seed);
        rng.shuffle(anchors_);
    }
}

std::optional<WindowBatch> WindowStream::next() {
    if (pos_ >= anchors_.size()) return std::nullopt;
    const size_t take = std::min(static_cast<size_t>(batch_), anchors_.size() - pos_);
    std::vector<long> chunk(anchors_.begin() + static_cast<long>(pos_),
                            anchors_.begin() + static_cast<long>(pos_ + take));
    pos_ += take;
    return make_batch(*ds_, chunk, L_, H_);
}

WindowBatch make_batch(const SeriesDataset& ds, const std::vector<long>& anchors, int L, int H,
                       bool with_horizon) {
    const int B = static_cast<int>(anchors.size());
    const int d = ds.num_features();
    WindowBatch wb;
    wb.anchors = anchors;
    wb.X_L = Tensor({B, L, d});
    wb.Y_L = Tensor({B, L, 1});
    float* xl = wb.X_L.data();
    float* yl = wb.Y_L.data();
    for (int b = 0; b < B; ++b) {
        const long t = anchors[b];
        if (t - L + 1 < 0 || t + (with_horizon ? H : 0) >= ds.rows())
            throw ValueError("window anchor out of range: t=" + std::to_string(t));
        for (int l = 0; l < L; ++l) {
            const long r = t - L + 1 + l;
            for (int c = 0; c < d; ++c) xl[(static_cast<int64_t>(b) * L + l) * d + c] = ds.X(r, c);
            yl[static_cast<int64_t>(b) * L + l] = ds.Y[r];
        }
    }
    if (with_horizon) {
        wb.X_H = Tensor({B, H, d});
        wb.Y_H = Tensor({B, H, 1});
        float* xh = wb.X_H.data();
        float* yh = wb.Y_H.data();
        for (int b = 0; b < B; ++b) {
            const long t = anchors[b];
            for (int h = 0; h < H; ++h) {
                const long r = t + 1 + h;
                for (int c = 0; c < d; ++c)
                    xh[(static_cast<int64_t>(b) * H + h) * d + c] = ds.X(r, c);
                yh[static_cast<int64_t>(b) * H + h] = ds.Y[r];
            }
        }
    }
    return wb;
}

}  // namespace shifts
