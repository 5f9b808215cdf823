#include "qb/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qb/errors.hpp"

namespace qb {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, std::size_t row) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        std::ostringstream os;
        os << "malformed numeric field '" << text << "' at row " << row;
        throw ContractError(os.str());
    }
    return v;
}

std::string mean_column(int component, int coord) {
    std::ostringstream os;
    os << "m" << component << "_" << coord;
    return os.str();
}

std::string cov_column(int component, int r, int s) {
    std::ostringstream os;
    os << "c" << component << "_" << r << "_" << s;
    return os.str();
}

void write_header(std::ofstream& out, int k, int d, bool gaussian) {
    bool first = true;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < d; ++j) {
            if (!first) out << ",";
            out << mean_column(i, j);
            first = false;
        }
    }
    if (gaussian) {
        for (int i = 0; i < k; ++i) {
            for (int r = 0; r < d; ++r) {
                for (int s = r; s < d; ++s) out << "," << cov_column(i, r, s);
            }
        }
    }
    out << "\n";
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_mean_samples(const std::string& path, const std::vector<ProductPoint>& samples) {
    if (samples.empty()) throw ContractError("write_mean_samples: nothing to write");
    const int k = static_cast<int>(samples.front().size());
    const int d = static_cast<int>(samples.front().front().size());
    auto out = open_for_write(path);
    write_header(out, k, d, /*gaussian=*/false);
    for (const auto& tuple : samples) {
        if (static_cast<int>(tuple.size()) != k) {
            throw ContractError("write_mean_samples: ragged sample list");
        }
        bool first = true;
        for (const auto& factor : tuple) {
            for (Eigen::Index j = 0; j < factor.size(); ++j) {
                if (!first) out << ",";
                out << format_double(factor(j));
                first = false;
            }
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_gaussian_samples(const std::string& path, const std::vector<GaussianTuple>& samples) {
    if (samples.empty()) throw ContractError("write_gaussian_samples: nothing to write");
    const int k = static_cast<int>(samples.front().size());
    const int d = static_cast<int>(samples.front().front().dim());
    auto out = open_for_write(path);
    write_header(out, k, d, /*gaussian=*/true);
    for (const auto& tuple : samples) {
        if (static_cast<int>(tuple.size()) != k) {
            throw ContractError("write_gaussian_samples: ragged sample list");
        }
        bool first = true;
        for (const auto& c : tuple) {
            for (Eigen::Index j = 0; j < c.mean.size(); ++j) {
                if (!first) out << ",";
                out << format_double(c.mean(j));
                first = false;
            }
        }
        for (const auto& c : tuple) {
            for (int r = 0; r < d; ++r) {
                for (int s = r; s < d; ++s) out << "," << format_double(c.covariance(r, s));
            }
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

SampleFile read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::string header;
    if (!std::getline(in, header)) throw ContractError("empty sample file '" + path + "'");
    const auto columns = split(header, ',');

    // Infer K and d from the header layout.
    int k = 0;
    int d = 0;
    std::size_t mean_cols = 0;
    bool has_logp = false;
    for (const auto& c : columns) {
        if (c.rfind('m', 0) == 0) ++mean_cols;
    }
    if (!columns.empty() && columns.back() == "logp") has_logp = true;
    const std::size_t payload_cols = columns.size() - (has_logp ? 1 : 0);
    if (mean_cols == 0) throw ContractError("sample file '" + path + "' has no mean columns");
    for (const auto& c : columns) {
        if (c.rfind('m', 0) == 0) {
            int i = 0, j = 0;
            if (std::sscanf(c.c_str(), "m%d_%d", &i, &j) == 2) {
                k = std::max(k, i + 1);
                d = std::max(d, j + 1);
            }
        }
    }
    if (k <= 0 || d <= 0 || mean_cols != static_cast<std::size_t>(k) * d) {
        throw ContractError("sample file '" + path + "' has an inconsistent mean header");
    }
    const std::size_t cov_entries = static_cast<std::size_t>(d) * (d + 1) / 2;
    const bool gaussian = payload_cols > mean_cols;
    if (gaussian && payload_cols != mean_cols + static_cast<std::size_t>(k) * cov_entries) {
        throw ContractError("sample file '" + path + "' has an inconsistent covariance header");
    }
    if (!gaussian && payload_cols != mean_cols) {
        throw ContractError("sample file '" + path + "' has unexpected extra columns");
    }

    SampleFile file;
    file.components = k;
    file.dim = d;
    file.gaussian = gaussian;

    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != columns.size()) {
            std::ostringstream os;
            os << "row " << row << " has " << fields.size() << " fields, expected "
               << columns.size();
            throw ContractError(os.str());
        }
        std::size_t pos = 0;
        std::vector<Eigen::VectorXd> means(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            means[static_cast<std::size_t>(i)].resize(d);
            for (int j = 0; j < d; ++j) {
                means[static_cast<std::size_t>(i)](j) = parse_double(fields[pos++], row);
            }
        }
        if (gaussian) {
            GaussianTuple tuple;
            tuple.reserve(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) {
                Eigen::MatrixXd cov(d, d);
                for (int r = 0; r < d; ++r) {
                    for (int s = r; s < d; ++s) {
                        const double v = parse_double(fields[pos++], row);
                        cov(r, s) = v;
                        cov(s, r) = v;
                    }
                }
                tuple.push_back(make_gaussian(means[static_cast<std::size_t>(i)], cov));
            }
            file.gaussian_tuples.push_back(std::move(tuple));
        } else {
            file.mean_tuples.push_back(std::move(means));
        }
        if (has_logp) file.log_density.push_back(parse_double(fields[pos], row));
    }
    if (file.size() == 0) throw ContractError("sample file '" + path + "' has no rows");
    return file;
}

void write_results(const std::string& path, const std::vector<Json>& records) {
    auto out = open_for_write(path);
    for (const auto& r : records) out << r.dump() << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Json> read_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<Json> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        Json parsed = Json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            std::ostringstream os;
            os << "result file '" << path << "': invalid JSON at line " << row;
            throw ContractError(os.str());
        }
        out.push_back(std::move(parsed));
    }
    return out;
}

KvConfig KvConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    KvConfig cfg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::ostringstream os;
            os << "config '" << path << "': expected key=value at line " << row;
            throw ConfigError(os.str());
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto key_end = key.find_last_not_of(" \t");
        key = key.substr(0, key_end + 1);
        const auto value_start = value.find_first_not_of(" \t");
        value = value_start == std::string::npos ? "" : value.substr(value_start);
        cfg.values_[key] = value;
    }
    return cfg;
}

void KvConfig::set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
}

bool KvConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long KvConfig::get_long(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an unsigned integer: " + it->second);
    }
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
}

Json KvConfig::to_json() const {
    Json j = Json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

} // namespace qb
