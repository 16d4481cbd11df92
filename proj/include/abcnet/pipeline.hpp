#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abcnet/mlp.hpp"

namespace abcnet::data {

using mlp::SamplePair;
using mlp::Vector;

struct CatalogRecord {
    std::int64_t timestamp = 0;  // seconds since Unix epoch, UTC
    double latitude = 0;
    double longitude = 0;
    double depth = 0;
    double magnitude = 0;
};

struct RegionFilter {
    double lat_min = 32.0;
    double lat_max = 37.0;
    double lon_min = -122.0;
    double lon_max = -114.0;
    std::string date_min = "2010-01-01";
    std::string date_max = "2011-05-30";
};

enum class Aggregator { max, mean, count };
enum class GapPolicy { carry_forward, skip, zero };

Aggregator aggregator_from_string(const std::string& name);

// Linear map fitted on the training segment only.
struct ScalerParams {
    double observed_min = 0;
    double observed_max = 1;
};

struct WindowedDataset {
    std::vector<SamplePair> train;
    std::vector<SamplePair> test;
    int horizon = 1;
    int window = 1;
    ScalerParams scaler;
};

// ISO-8601 UTC timestamp (YYYY-MM-DDThh:mm:ssZ) -> seconds since epoch.
std::int64_t parse_timestamp(const std::string& text);
std::int64_t parse_date(const std::string& text);  // YYYY-MM-DD -> epoch seconds at midnight

// CSV schema: datetime,latitude,longitude,depth,magnitude. Returns records
// inside the filter box and date range, sorted by timestamp ascending.
std::vector<CatalogRecord> load_catalog(const std::string& path, const RegionFilter& filter);

// One value per calendar day in range; gap days are filled per policy.
std::vector<std::pair<std::int64_t, double>> daily_series(
    const std::vector<CatalogRecord>& records, Aggregator aggregator = Aggregator::max,
    GapPolicy gaps = GapPolicy::carry_forward);

inline ScalerParams fit_scaler(const std::vector<double>& train_values) {
    if (train_values.size() < 2)
        throw std::invalid_argument("fit_scaler: need at least 2 training values");
    double lo = train_values[0], hi = train_values[0];
    for (double v : train_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw std::invalid_argument("fit_scaler: constant training series");
    return ScalerParams{lo, hi};
}

// observed_min -> 0, observed_max -> 1; out-of-range values clamp into [0,1].
inline double apply(const ScalerParams& s, double x) {
    const double y = (x - s.observed_min) / (s.observed_max - s.observed_min);
    return std::min(std::max(y, 0.0), 1.0);
}

inline double invert(const ScalerParams& s, double y) {
    return s.observed_min + y * (s.observed_max - s.observed_min);
}

// Sample t: input = values[t .. t+w-1]. With one output the target is the
// value at offset h past the window end; with k > 1 outputs the target is
// the next k values jointly (horizons 1..k).
std::vector<SamplePair> make_windows(const std::vector<double>& series, int window,
                                     int horizon, int outputs = 1);

std::pair<std::vector<SamplePair>, std::vector<SamplePair>> split(
    const std::vector<SamplePair>& pairs, double ratio = 0.7);

// End-to-end: fit the scaler on the training segment of the raw series,
// scale, window, split chronologically. No test value influences the scaler.
WindowedDataset build_dataset(const std::vector<double>& raw_series, int window,
                              int horizon, int outputs = 1, double ratio = 0.7);

}  // namespace abcnet::data
