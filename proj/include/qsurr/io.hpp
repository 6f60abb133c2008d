#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qsurr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment configs are JSON or a flat TOML subset ([section], key = value,
// strings / numbers / booleans / homogeneous arrays). Both parse into the
// same JSON object: sections become nested objects.
nlohmann::json load_config(const std::filesystem::path& path);
nlohmann::json parse_toml_text(const std::string& text);

// deterministic numeric formatting shared by every CSV/JSON writer
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    void close();
    ~CsvWriter();

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t columns_ = 0;
    bool closed_ = false;
};

std::uint64_t fnv1a_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Run manifest: config echo, seed, and a content hash per output file.
class Manifest {
public:
    Manifest(nlohmann::json config_echo, std::uint64_t seed);
    void add_file(const std::filesystem::path& path);
    void set(const std::string& key, nlohmann::json value);
    void write(const std::filesystem::path& path) const;

private:
    nlohmann::json doc_;
};

}  // namespace qsurr
