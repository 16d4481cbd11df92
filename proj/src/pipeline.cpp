#include "abcnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace abcnet::data {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a / b - ((a % b != 0) && ((a % b < 0) != (b < 0)));
}

}  // namespace

Aggregator aggregator_from_string(const std::string& name) {
    if (name == "max") return Aggregator::max;
    if (name == "mean") return Aggregator::mean;
    if (name == "count") return Aggregator::count;
    throw std::invalid_argument("unknown aggregator: " + name);
}

std::int64_t parse_timestamp(const std::string& text) {
    int y, mo, d, h, mi, s;
    char z = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 ||
        z != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 ||
        mi < 0 || mi > 59 || s < 0 || s > 60)
        throw std::invalid_argument("bad ISO-8601 timestamp: " + text);
    return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::int64_t parse_date(const std::string& text) {
    int y, mo, d;
    if (std::sscanf(text.c_str(), "%d-%d-%d", &y, &mo, &d) != 3 || mo < 1 || mo > 12 ||
        d < 1 || d > 31)
        throw std::invalid_argument("bad date: " + text);
    return days_from_civil(y, mo, d) * kSecondsPerDay;
}

std::vector<CatalogRecord> load_catalog(const std::string& path, const RegionFilter& filter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open catalog file: " + path);

    const std::int64_t t_min = parse_date(filter.date_min);
    const std::int64_t t_max = parse_date(filter.date_max) + kSecondsPerDay;  // inclusive end date

    std::string line;
    if (!std::getline(in, line) || line.rfind("datetime,", 0) != 0)
        throw std::runtime_error(path + ": missing or bad header row");

    std::vector<CatalogRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(row, field[i], ',')) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected 5 comma-separated fields");
            }
        }
        CatalogRecord rec;
        try {
            rec.timestamp = parse_timestamp(field[0]);
            rec.latitude = std::stod(field[1]);
            rec.longitude = std::stod(field[2]);
            rec.depth = std::stod(field[3]);
            rec.magnitude = std::stod(field[4]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!std::isfinite(rec.magnitude) || rec.latitude < -90 || rec.latitude > 90 ||
            rec.longitude < -180 || rec.longitude > 180)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": field out of physical range");
        if (rec.latitude < filter.lat_min || rec.latitude > filter.lat_max ||
            rec.longitude < filter.lon_min || rec.longitude > filter.lon_max ||
            rec.timestamp < t_min || rec.timestamp >= t_max)
            continue;
        records.push_back(rec);
    }
    if (records.empty())
        throw std::runtime_error(path + ": no catalog records inside the filter");
    std::stable_sort(records.begin(), records.end(),
                     [](const CatalogRecord& a, const CatalogRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return records;
}

std::vector<std::pair<std::int64_t, double>> daily_series(
    const std::vector<CatalogRecord>& records, Aggregator aggregator, GapPolicy gaps) {
    std::map<std::int64_t, std::pair<double, int>> by_day;  // day -> (accum, count)
    for (const auto& r : records) {
        const std::int64_t day = floor_div(r.timestamp, kSecondsPerDay);
        auto [it, inserted] = by_day.try_emplace(day, r.magnitude, 1);
        if (!inserted) {
            auto& [accum, count] = it->second;
            if (aggregator == Aggregator::max)
                accum = std::max(accum, r.magnitude);
            else
                accum += r.magnitude;
            ++count;
        }
    }

    std::vector<std::pair<std::int64_t, double>> series;
    if (by_day.empty()) return series;

    auto value_of = [&](const std::pair<double, int>& cell) {
        switch (aggregator) {
            case Aggregator::max: return cell.first;
            case Aggregator::mean: return cell.first / cell.second;
            case Aggregator::count: return static_cast<double>(cell.second);
        }
        return cell.first;
    };

    const std::int64_t first = by_day.begin()->first;
    const std::int64_t last = by_day.rbegin()->first;
    double previous = value_of(by_day.begin()->second);
    for (std::int64_t day = first; day <= last; ++day) {
        auto it = by_day.find(day);
        if (it != by_day.end()) {
            previous = value_of(it->second);
            series.emplace_back(day, previous);
        } else {
            switch (gaps) {
                case GapPolicy::carry_forward: series.emplace_back(day, previous); break;
                case GapPolicy::zero: series.emplace_back(day, 0.0); break;
                case GapPolicy::skip: break;
            }
        }
    }
    return series;
}

std::vector<SamplePair> make_windows(const std::vector<double>& series, int window,
                                     int horizon, int outputs) {
    if (window < 1 || horizon < 1 || outputs < 1)
        throw std::invalid_argument("make_windows: window, horizon, outputs must be >= 1");
    const int reach = outputs == 1 ? horizon : outputs;
    const std::int64_t needed = static_cast<std::int64_t>(window) + reach + 1;
    const std::int64_t count = static_cast<std::int64_t>(series.size()) - window - reach + 1;
    if (count < 1)
        throw std::invalid_argument("make_windows: series too short, need length > " +
                                    std::to_string(needed - 1));

    std::vector<SamplePair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (std::int64_t t = 0; t < count; ++t) {
        SamplePair p;
        p.input = Eigen::Map<const Vector>(series.data() + t, window);
        if (outputs == 1) {
            p.target = Vector::Constant(1, series[t + window - 1 + horizon]);
        } else {
            p.target = Eigen::Map<const Vector>(series.data() + t + window, outputs);
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::pair<std::vector<SamplePair>, std::vector<SamplePair>> split(
    const std::vector<SamplePair>& pairs, double ratio) {
    const auto cut = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(pairs.size())));
    return {std::vector<SamplePair>(pairs.begin(), pairs.begin() + cut),
            std::vector<SamplePair>(pairs.begin() + cut, pairs.end())};
}

WindowedDataset build_dataset(const std::vector<double>& raw_series, int window,
                              int horizon, int outputs, double ratio) {
    const int reach = outputs == 1 ? horizon : outputs;
    const std::int64_t count =
        static_cast<std::int64_t>(raw_series.size()) - window - reach + 1;
    if (count < 2)
        throw std::invalid_argument("build_dataset: series too short for a train/test split");
    const auto cut = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(count)));
    if (cut < 1 || cut >= static_cast<std::size_t>(count))
        throw std::invalid_argument("build_dataset: split leaves an empty train or test set");

    // the scaler sees only values reachable from training samples
    const std::size_t last_train_pos = (cut - 1) + window - 1 + reach;
    std::vector<double> train_segment(raw_series.begin(),
                                      raw_series.begin() + last_train_pos + 1);
    const ScalerParams scaler = fit_scaler(train_segment);

    std::vector<double> scaled(raw_series.size());
    for (std::size_t i = 0; i < raw_series.size(); ++i) scaled[i] = apply(scaler, raw_series[i]);

    WindowedDataset ds;
    ds.horizon = horizon;
    ds.window = window;
    ds.scaler = scaler;
    auto pairs = make_windows(scaled, window, horizon, outputs);
    std::tie(ds.train, ds.test) = split(pairs, ratio);
    return ds;
}

}  // namespace abcnet::data
