#include "qsurr/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qsurr {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

nlohmann::json toml_scalar(const std::string& raw) {
    std::string v = trim(raw);
    if (v.empty()) throw ConfigError("empty TOML value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError("unterminated string: " + v);
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        if (v.find_first_of(".eE") != std::string::npos &&
            v.find_first_not_of("+-0123456789.eE") == std::string::npos) {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used == v.size()) return d;
        }
        std::size_t used = 0;
        long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
        double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (...) {
    }
    throw ConfigError("cannot parse TOML value: " + v);
}

nlohmann::json toml_value(const std::string& raw) {
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated array: " + v);
        nlohmann::json arr = nlohmann::json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        int depth = 0;
        bool instr = false;
        for (char c : inner) {
            if (c == '"') instr = !instr;
            if (!instr && c == '[') ++depth;
            if (!instr && c == ']') --depth;
            if (!instr && depth == 0 && c == ',') {
                if (!trim(item).empty()) arr.push_back(toml_value(item));
                item.clear();
            } else {
                item.push_back(c);
            }
        }
        if (!trim(item).empty()) arr.push_back(toml_value(item));
        return arr;
    }
    return toml_scalar(v);
}

}  // namespace

nlohmann::json parse_toml_text(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* section = &root;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("bad section header at line " + std::to_string(lineno));
            std::string name = trim(s.substr(1, s.size() - 2));
            section = &root;
            std::size_t pos = 0;
            while (pos != std::string::npos) {
                std::size_t dot = name.find('.', pos);
                std::string part = name.substr(pos, dot == std::string::npos ? dot : dot - pos);
                section = &((*section)[trim(part)]);
                if (!section->is_object()) *section = nlohmann::json::object();
                pos = dot == std::string::npos ? dot : dot + 1;
            }
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(s.substr(0, eq));
        // strip trailing comments outside strings
        std::string rhs = s.substr(eq + 1);
        bool instr = false;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            if (rhs[i] == '"') instr = !instr;
            if (!instr && rhs[i] == '#') {
                rhs = rhs.substr(0, i);
                break;
            }
        }
        (*section)[key] = toml_value(rhs);
    }
    return root;
}

nlohmann::json load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    std::string text = read_text_file(path);
    if (path.extension() == ".json") {
        try {
            return nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad JSON config: ") + e.what());
        }
    }
    return parse_toml_text(text);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_.push_back(',');
        buffer_ += columns[i];
    }
    buffer_.push_back('\n');
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::invalid_argument("CSV row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_.push_back(',');
        buffer_ += format_double(values[i]);
    }
    buffer_.push_back('\n');
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_.push_back(',');
        buffer_ += cells[i];
    }
    buffer_.push_back('\n');
}

void CsvWriter::close() {
    if (closed_) return;
    write_text_file(path_, buffer_);
    closed_ = true;
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path.string());
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Manifest::Manifest(nlohmann::json config_echo, std::uint64_t seed) {
    doc_["config"] = std::move(config_echo);
    doc_["seed"] = seed;
    doc_["version"] = "1.0";
    doc_["files"] = nlohmann::json::array();
}

void Manifest::add_file(const std::filesystem::path& path) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    doc_["files"].push_back({{"path", path.filename().string()}, {"fnv1a64", hex}});
}

void Manifest::set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

void Manifest::write(const std::filesystem::path& path) const {
    write_text_file(path, doc_.dump(2) + "\n");
}

}  // namespace qsurr
