#include "itgp/datasets.hpp"

#include "itgp/errors.hpp"
#include "itgp/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace itgp {

Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    const auto m = static_cast<Eigen::Index>(indices.size());
    out.x.resize(m);
    out.y.resize(m);
    if (data.has_truth()) out.f_true.resize(m);
    if (data.has_outlier_flags()) out.is_outlier.resize(indices.size());
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto i = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(k)]);
        if (i < 0 || i >= data.x.size()) {
            throw std::invalid_argument("subset: index out of range");
        }
        out.x[k] = data.x[i];
        out.y[k] = data.y[i];
        if (data.has_truth()) out.f_true[k] = data.f_true[i];
        if (data.has_outlier_flags()) out.is_outlier[static_cast<std::size_t>(k)] =
            data.is_outlier[static_cast<std::size_t>(i)];
    }
    return out;
}

NealCase NealCase::fiducial(std::uint64_t seed) {
    NealCase c;
    c.seed = seed;
    return c;
}

NealCase NealCase::abundant(std::uint64_t seed) {
    NealCase c;
    c.pi_o = 0.45;
    c.seed = seed;
    return c;
}

NealCase NealCase::skewed(std::uint64_t seed, double b_o) {
    NealCase c;
    c.b_o = b_o;
    c.seed = seed;
    return c;
}

NealCase NealCase::extreme(std::uint64_t seed) {
    NealCase c;
    c.sigma_o = 5.0;
    c.seed = seed;
    return c;
}

double neal_true_function(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("neal_true_function: x must be finite");
    return 0.3 + 0.4 * x + 0.5 * std::sin(2.7 * x) + 1.1 / (1.0 + x * x);
}

namespace {

std::size_t outlier_count(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
}

std::vector<bool> flags_from_indices(std::size_t n, const std::vector<std::size_t>& idx) {
    std::vector<bool> flags(n, false);
    for (auto i : idx) flags[i] = true;
    return flags;
}

} // namespace

Dataset generate_neal(const NealCase& c) {
    if (c.pi_o < 0.0 || c.pi_o >= 1.0 || c.sigma_o <= 0.0 || c.sigma_r <= 0.0 || c.n_train < 1) {
        throw std::invalid_argument("generate_neal: invalid case parameters");
    }
    const std::size_t n = c.n_train;
    Rng rng(c.seed);

    // Draw order is fixed: all x first, then the outlier index set, then one
    // noise value per point in index order.
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(n));
    d.y.resize(static_cast<Eigen::Index>(n));
    d.f_true.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.x.size(); ++i) d.x[i] = rng.uniform(-3.0, 3.0);

    const auto outliers = rng.sample_without_replacement(n, outlier_count(c.pi_o, n));
    d.is_outlier = flags_from_indices(n, outliers);

    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
        d.f_true[i] = neal_true_function(d.x[i]);
        if (d.is_outlier[static_cast<std::size_t>(i)]) {
            d.y[i] = d.f_true[i] + c.b_o + rng.normal(0.0, c.sigma_o);
        } else {
            d.y[i] = d.f_true[i] + rng.normal(0.0, c.sigma_r);
        }
    }
    return d;
}

Dataset generate_neal_test_grid(std::size_t m) {
    if (m < 2) throw std::invalid_argument("generate_neal_test_grid: need m >= 2");
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(m));
    d.y.resize(static_cast<Eigen::Index>(m));
    d.f_true.resize(static_cast<Eigen::Index>(m));
    d.is_outlier.assign(m, false);
    const double step = 6.0 / static_cast<double>(m - 1);
    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
        d.x[i] = -3.0 + step * static_cast<double>(i);
        d.f_true[i] = neal_true_function(d.x[i]);
        d.y[i] = d.f_true[i];
    }
    return d;
}

double cluster_ridge_function(double x) {
    const double t = (x - 10.0) / 8.0;
    return 0.6 + 1.4 * t - 0.35 * t * t + 0.6 * t * t * t;
}

double cluster_noise_sd(double x) {
    return 0.005 + 0.045 * (x - 10.0) / 8.0;
}

Dataset generate_cluster_like(std::size_t n, double outlier_frac, std::uint64_t seed) {
    if (n < 50) throw std::invalid_argument("generate_cluster_like: need n >= 50");
    if (outlier_frac < 0.0 || outlier_frac >= 1.0) {
        throw std::invalid_argument("generate_cluster_like: outlier_frac must lie in [0, 1)");
    }
    Rng rng(seed);

    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(n));
    d.y.resize(static_cast<Eigen::Index>(n));
    d.f_true.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.x.size(); ++i) d.x[i] = rng.uniform(10.0, 18.0);

    const auto outliers = rng.sample_without_replacement(n, outlier_count(outlier_frac, n));
    d.is_outlier = flags_from_indices(n, outliers);

    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
        d.f_true[i] = cluster_ridge_function(d.x[i]);
        if (d.is_outlier[static_cast<std::size_t>(i)]) {
            // one-sided shift toward larger y, no extra scatter
            d.y[i] = d.f_true[i] + rng.uniform(0.02, 0.4);
        } else {
            d.y[i] = d.f_true[i] + rng.normal(0.0, cluster_noise_sd(d.x[i]));
        }
    }
    return d;
}

Dataset generate_cluster_test_grid(std::size_t m) {
    if (m < 2) throw std::invalid_argument("generate_cluster_test_grid: need m >= 2");
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(m));
    d.y.resize(static_cast<Eigen::Index>(m));
    d.f_true.resize(static_cast<Eigen::Index>(m));
    d.is_outlier.assign(m, false);
    const double step = 8.0 / static_cast<double>(m - 1);
    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
        d.x[i] = 10.0 + step * static_cast<double>(i);
        d.f_true[i] = cluster_ridge_function(d.x[i]);
        d.y[i] = d.f_true[i];
    }
    return d;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const Dataset& data) {
    const bool flags = data.has_outlier_flags();
    const bool truth = data.has_truth();
    out << "x,y";
    if (flags) out << ",is_outlier";
    if (truth) out << ",f_true";
    out << '\n';
    for (Eigen::Index i = 0; i < data.x.size(); ++i) {
        out << format_double(data.x[i]) << ',' << format_double(data.y[i]);
        if (flags) out << ',' << (data.is_outlier[static_cast<std::size_t>(i)] ? 1 : 0);
        if (truth) out << ',' << format_double(data.f_true[i]);
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, data);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw CsvError(line_no, "non-numeric value '" + field + "' in column " + column);
    }
    return v;
}

} // namespace

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError(1, "empty file, expected a header row");
    const auto header = split_csv_line(line);

    int col_x = -1, col_y = -1, col_flag = -1, col_truth = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") col_x = static_cast<int>(i);
        else if (header[i] == "y") col_y = static_cast<int>(i);
        else if (header[i] == "is_outlier") col_flag = static_cast<int>(i);
        else if (header[i] == "f_true") col_truth = static_cast<int>(i);
        else throw CsvError(1, "unknown column '" + header[i] + "'");
    }
    if (col_x < 0 || col_y < 0) throw CsvError(1, "header must contain columns x and y");

    std::vector<double> xs, ys, truths;
    std::vector<bool> flags;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        xs.push_back(parse_number(fields[static_cast<std::size_t>(col_x)], line_no, "x"));
        ys.push_back(parse_number(fields[static_cast<std::size_t>(col_y)], line_no, "y"));
        if (col_flag >= 0) {
            const double v = parse_number(fields[static_cast<std::size_t>(col_flag)], line_no, "is_outlier");
            flags.push_back(v != 0.0);
        }
        if (col_truth >= 0) {
            truths.push_back(parse_number(fields[static_cast<std::size_t>(col_truth)], line_no, "f_true"));
        }
    }
    if (xs.empty()) throw CsvError(line_no, "no data rows");

    Dataset d;
    d.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    if (!truths.empty()) {
        d.f_true = Eigen::Map<Eigen::VectorXd>(truths.data(), static_cast<Eigen::Index>(truths.size()));
    }
    d.is_outlier = std::move(flags);
    if (!d.x.allFinite() || !d.y.allFinite()) {
        throw CsvError(line_no, "file contains non-finite values");
    }
    return d;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_csv(in);
}

} // namespace itgp
