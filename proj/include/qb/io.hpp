#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qb/gaussian_manifold.hpp"
#include "qb/manifold.hpp"

namespace qb {

using Json = nlohmann::json;

inline constexpr int kResultSchemaVersion = 1;

/// Parsed sample file. Mean-only files carry K*d columns m{i}_{j}; Gaussian
/// files append the d*(d+1)/2 upper-triangular covariance columns c{i}_{r}_{s}
/// per component. A trailing logp column is accepted on input (external
/// samplers may provide it) and never written by gen.
struct SampleFile {
    int components = 0;
    int dim = 0;
    bool gaussian = false;
    std::vector<ProductPoint> mean_tuples;
    std::vector<GaussianTuple> gaussian_tuples;
    std::vector<double> log_density; ///< empty when the column is absent

    std::size_t size() const {
        return gaussian ? gaussian_tuples.size() : mean_tuples.size();
    }
};

void write_mean_samples(const std::string& path, const std::vector<ProductPoint>& samples);
void write_gaussian_samples(const std::string& path, const std::vector<GaussianTuple>& samples);
SampleFile read_samples(const std::string& path);

/// Result files are line-oriented: one self-describing JSON object per line,
/// each carrying the schema version and the config echo.
void write_results(const std::string& path, const std::vector<Json>& records);
std::vector<Json> read_results(const std::string& path);

/// Flat key=value configuration with dotted sections. '#' starts a comment;
/// blank lines are ignored. CLI flags override file values.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig load(const std::string& path);

    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    Json to_json() const;

private:
    std::map<std::string, std::string> values_;
};

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

} // namespace qb
