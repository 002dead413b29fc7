#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::data {

struct Dataset {
    std::string name;
    Matrix features;
    std::vector<int> labels;  // 1 = minority positive
    std::vector<std::string> feature_names;
    std::vector<std::string> warnings;

    std::size_t positives() const {
        std::size_t c = 0;
        for (int y : labels) c += static_cast<std::size_t>(y == 1);
        return c;
    }
    std::size_t negatives() const { return labels.size() - positives(); }
};

struct RegistryEntry {
    std::string name;
    std::size_t expected_instances;
    std::size_t expected_attributes;
    std::size_t expected_pos;
    std::size_t expected_neg;
};

// The benchmark registry of expected dataset shapes.
inline const std::vector<RegistryEntry>& dataset_registry() {
    static const std::vector<RegistryEntry> table = {
        {"Pima", 768, 8, 268, 500},
        {"WBC", 699, 9, 241, 458},
        {"Haberman", 306, 3, 81, 225},
        {"Ionosphere", 351, 34, 126, 225},
        {"Parkinson", 195, 23, 48, 147},
        {"Blood", 748, 4, 178, 570},
        {"Bankruptcy-1", 7027, 64, 271, 6756},
        {"Bankruptcy-2", 10173, 64, 400, 9773},
        {"Bankruptcy-3", 10503, 64, 495, 10008},
        {"Bankruptcy-5", 5910, 64, 410, 5500},
    };
    return table;
}

inline const RegistryEntry* find_registry_entry(const std::string& name) {
    for (const auto& e : dataset_registry())
        if (e.name == name) return &e;
    return nullptr;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace detail

// Strict numeric CSV loader. Non-numeric or missing cells abort with their
// (row, column) coordinates; labels map to {0,1} against positive_label. If
// positives outnumber negatives the labels are flipped so the positive class
// stays the minority, with a warning recorded on the dataset.
inline Dataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& positive_label, const std::string& name = "") {
    std::ifstream in(path);
    if (!in) throw InputError("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("load_csv: empty file " + path);
    const auto header = detail::split_csv_line(line);
    std::size_t label_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (detail::trim(header[i]) == label_column) label_col = i;
    if (label_col == header.size())
        throw InputError("load_csv: label column '" + label_column + "' not found in " + path);

    Dataset ds;
    ds.name = name.empty() ? path : name;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_col) ds.feature_names.push_back(detail::trim(header[i]));

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw InputError("load_csv: row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        Vec feat;
        feat.reserve(header.size() - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = detail::trim(cells[c]);
            if (c == label_col) {
                ds.labels.push_back(cell == positive_label ? 1 : 0);
                continue;
            }
            if (cell.empty())
                throw InputError("load_csv: missing value at row " + std::to_string(row) +
                                 ", column " + std::to_string(c + 1));
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size() || !std::isfinite(v))
                throw InputError("load_csv: unparseable cell '" + cell + "' at row " +
                                 std::to_string(row) + ", column " + std::to_string(c + 1));
            feat.push_back(v);
        }
        ds.features.push_row(feat);
    }
    if (ds.labels.empty()) throw InputError("load_csv: no data rows in " + path);
    if (ds.positives() > ds.negatives()) {
        for (int& y : ds.labels) y = 1 - y;
        ds.warnings.push_back("positive class was the majority; labels flipped");
    }
    return ds;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("write_csv: cannot open " + path);
    for (const auto& fn : ds.feature_names) out << fn << ",";
    out << "label\n";
    char buf[40];
    for (std::size_t r = 0; r < ds.features.rows(); ++r) {
        for (std::size_t c = 0; c < ds.features.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.features(r, c));
            out << buf << ",";
        }
        out << ds.labels[r] << "\n";
    }
}

struct ValidationReport {
    bool clean = true;
    std::vector<std::string> notes;
};

// Shape checks are advisory: public mirrors drift, so mismatches warn.
inline ValidationReport validate_against_registry(const Dataset& ds, const RegistryEntry& entry) {
    ValidationReport report;
    auto note = [&](const std::string& msg) {
        report.clean = false;
        report.notes.push_back(msg);
    };
    if (ds.labels.size() != entry.expected_instances)
        note("instances: got " + std::to_string(ds.labels.size()) + ", expected " +
             std::to_string(entry.expected_instances));
    if (ds.features.cols() != entry.expected_attributes)
        note("attributes: got " + std::to_string(ds.features.cols()) + ", expected " +
             std::to_string(entry.expected_attributes));
    if (ds.positives() != entry.expected_pos)
        note("positives: got " + std::to_string(ds.positives()) + ", expected " +
             std::to_string(entry.expected_pos));
    if (ds.negatives() != entry.expected_neg)
        note("negatives: got " + std::to_string(ds.negatives()) + ", expected " +
             std::to_string(entry.expected_neg));
    return report;
}

// Per-feature min-max scaler, fit on the training fold only.
class MinMaxScaler {
public:
    static MinMaxScaler fit(const Matrix& train, const std::vector<std::size_t>* rows = nullptr) {
        if (train.rows() == 0) throw InputError("MinMaxScaler: cannot fit on empty matrix");
        MinMaxScaler s;
        s.min_.assign(train.cols(), std::numeric_limits<double>::infinity());
        s.max_.assign(train.cols(), -std::numeric_limits<double>::infinity());
        auto absorb = [&](std::size_t r) {
            for (std::size_t c = 0; c < train.cols(); ++c) {
                s.min_[c] = std::min(s.min_[c], train(r, c));
                s.max_[c] = std::max(s.max_[c], train(r, c));
            }
        };
        if (rows) {
            if (rows->empty()) throw InputError("MinMaxScaler: empty row selection");
            for (std::size_t r : *rows) absorb(r);
        } else {
            for (std::size_t r = 0; r < train.rows(); ++r) absorb(r);
        }
        return s;
    }

    // Constant features map to 0; test values may leave [0,1].
    double transform_value(std::size_t col, double v) const {
        const double range = max_[col] - min_[col];
        return range == 0.0 ? 0.0 : (v - min_[col]) / range;
    }

    Matrix transform(const Matrix& m) const {
        if (m.cols() != min_.size()) throw InputError("MinMaxScaler: width mismatch");
        Matrix out(m.rows(), m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                out(r, c) = transform_value(c, m(r, c));
        return out;
    }

    Vec transform(const Vec& v) const {
        if (v.size() != min_.size()) throw InputError("MinMaxScaler: width mismatch");
        Vec out(v.size());
        for (std::size_t c = 0; c < v.size(); ++c) out[c] = transform_value(c, v[c]);
        return out;
    }

private:
    Vec min_, max_;
};

enum class SyntheticKind { two_gaussians, moons, ring };

inline SyntheticKind synthetic_kind_from_string(const std::string& s) {
    if (s == "two_gaussians") return SyntheticKind::two_gaussians;
    if (s == "moons") return SyntheticKind::moons;
    if (s == "ring") return SyntheticKind::ring;
    throw InputError("unknown synthetic kind: " + s);
}

// Reproducible 2-D imbalanced datasets. `overlap` in [0,1] slides the
// minority cluster into the majority: 0 keeps the classes separable.
inline Dataset make_synthetic(SyntheticKind kind, std::size_t n_major, std::size_t n_minor,
                              double overlap, std::uint64_t seed) {
    if (n_minor < 2) throw InputError("make_synthetic: n_minor must be >= 2");
    Dataset ds;
    ds.feature_names = {"x0", "x1"};
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);

    auto add = [&](double x, double y, int label) {
        ds.features.push_row({x, y});
        ds.labels.push_back(label);
    };

    switch (kind) {
        case SyntheticKind::two_gaussians: {
            ds.name = "two_gaussians";
            const double sep = 6.0 * (1.0 - overlap);
            for (std::size_t i = 0; i < n_major; ++i) add(gauss(rng), gauss(rng), 0);
            for (std::size_t i = 0; i < n_minor; ++i)
                add(sep + gauss(rng), sep + gauss(rng), 1);
            break;
        }
        case SyntheticKind::moons: {
            ds.name = "moons";
            const double noise = 0.1 + 0.4 * overlap;
            for (std::size_t i = 0; i < n_major; ++i) {
                const double a = angle(rng) / 2.0;
                add(std::cos(a) + noise * gauss(rng), std::sin(a) + noise * gauss(rng), 0);
            }
            for (std::size_t i = 0; i < n_minor; ++i) {
                const double a = angle(rng) / 2.0;
                add(1.0 - std::cos(a) + noise * gauss(rng),
                    0.5 - std::sin(a) + noise * gauss(rng), 1);
            }
            break;
        }
        case SyntheticKind::ring: {
            ds.name = "ring";
            const double r_inner = 1.0, r_outer = 3.0 - 1.5 * overlap;
            for (std::size_t i = 0; i < n_major; ++i) {
                const double a = angle(rng);
                const double r = r_outer + 0.3 * gauss(rng);
                add(r * std::cos(a), r * std::sin(a), 0);
            }
            for (std::size_t i = 0; i < n_minor; ++i) {
                const double a = angle(rng);
                const double r = r_inner + 0.3 * gauss(rng);
                add(r * std::cos(a), r * std::sin(a), 1);
            }
            break;
        }
    }
    return ds;
}

}  // namespace rebalance::data
