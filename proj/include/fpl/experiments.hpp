#ifndef FPL_EXPERIMENTS_HPP
#define FPL_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpl/common.hpp"
#include "fpl/spectral.hpp"

namespace fpl::experiments {

// Flat `key = value` config. '#' starts a comment; no nesting, no quoting.
class Config {
  public:
    static Config from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

// Pulls typed values out of a Config, materializing defaults, and records
// everything it resolved so the manifest can reproduce the run.
class Resolver {
  public:
    explicit Resolver(const Config& cfg) : cfg_(cfg) {}

    std::string str(const std::string& key, const std::string& def);
    double num(const std::string& key, double def);
    std::size_t count(const std::string& key, std::size_t def);
    bool flag(const std::string& key, bool def);
    Vec num_list(const std::string& key, const Vec& def);
    std::vector<std::size_t> count_list(const std::string& key,
                                        const std::vector<std::size_t>& def);
    // list that admits an "inf" entry, returned as SIZE_MAX
    std::vector<std::size_t> count_list_with_inf(const std::string& key, const std::string& def);
    // batch size: a whole number, or "full" (= 0, the whole dataset)
    std::size_t batch_size(const std::string& key, std::size_t def);

    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    // every key the experiment accepts must be declared through one of the
    // accessors; leftovers are unknown keys and fail the run
    void finish_validation() const;

  private:
    const Config& cfg_;
    std::map<std::string, std::string> resolved_;
    std::vector<std::string> seen_;
};

struct Manifest {
    std::string experiment;
    std::string version;
    std::map<std::string, std::string> config;        // fully resolved
    std::map<std::string, std::string> dataset_digests;
    std::vector<std::string> outputs;
    std::map<std::string, std::string> results;       // headline numbers
    std::size_t threads = 1;

    std::string to_json() const;
};

const std::vector<std::string>& experiment_names();

// Runs one named experiment; writes CSV traces, manifest.json, and SVG
// figures (when emit_svg) under out_dir. Unknown config keys fail fast.
Manifest run_experiment(const std::string& name, const Config& config, const std::string& out_dir,
                        bool emit_svg);

// First recorded epoch with delta_F(k) < threshold per grid frequency;
// nullopt marks "never".
std::vector<std::optional<std::size_t>> threshold_crossing_epochs(
    const spectral::SpectrumTrace& trace, double threshold);

}  // namespace fpl::experiments

#endif
