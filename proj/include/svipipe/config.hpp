#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// TOML-style configuration: [section] tables, key = value pairs, # comments.
// Values: strings, integers, floats, booleans, and flat arrays. Keys are
// addressed as "section.key". Unknown keys are the caller's job to reject
// (see keys()).

namespace svipipe::config {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<std::string, int64_t, double, bool, Array> data;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_int() const { return std::holds_alternative<int64_t>(data); }
    bool is_double() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
};

namespace detail {

inline void skip_ws(std::string_view s, size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::string parse_basic_string(std::string_view s, size_t& i, int line) {
    std::string out;
    ++i;  // opening quote
    while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) {
            ++i;
            switch (s[i]) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default:
                    throw std::runtime_error("config line " + std::to_string(line) +
                                             ": unsupported escape");
            }
        } else {
            out += s[i];
        }
        ++i;
    }
    if (i >= s.size()) {
        throw std::runtime_error("config line " + std::to_string(line) +
                                 ": unterminated string");
    }
    ++i;  // closing quote
    return out;
}

inline Value parse_scalar(std::string_view s, size_t& i, int line);

inline Value parse_value(std::string_view s, size_t& i, int line) {
    skip_ws(s, i);
    if (i >= s.size()) {
        throw std::runtime_error("config line " + std::to_string(line) + ": missing value");
    }
    if (s[i] == '[') {
        ++i;
        Array arr;
        while (true) {
            skip_ws(s, i);
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            arr.push_back(parse_scalar(s, i, line));
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            throw std::runtime_error("config line " + std::to_string(line) +
                                     ": malformed array");
        }
        return Value{std::move(arr)};
    }
    return parse_scalar(s, i, line);
}

inline Value parse_scalar(std::string_view s, size_t& i, int line) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == '"') return Value{parse_basic_string(s, i, line)};

    size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
    std::string token(s.substr(start, i - start));
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.pop_back();

    if (token == "true") return Value{true};
    if (token == "false") return Value{false};
    if (token.empty()) {
        throw std::runtime_error("config line " + std::to_string(line) + ": empty value");
    }

    const bool looks_float = token.find_first_of(".eE") != std::string::npos &&
                             token.find_first_not_of("+-0123456789.eE") == std::string::npos;
    try {
        if (looks_float) return Value{std::stod(token)};
        size_t pos = 0;
        const int64_t v = std::stoll(token, &pos);
        if (pos == token.size()) return Value{v};
        return Value{std::stod(token)};
    } catch (const std::exception&) {
        throw std::runtime_error("config line " + std::to_string(line) +
                                 ": cannot parse value '" + token + "'");
    }
}

}  // namespace detail

class Config {
  public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line_no = 0;

        while (std::getline(in, raw)) {
            ++line_no;
            std::string_view line(raw);
            size_t i = 0;
            detail::skip_ws(line, i);
            if (i >= line.size() || line[i] == '#') continue;

            if (line[i] == '[') {
                const size_t close = line.find(']', i);
                if (close == std::string_view::npos) {
                    throw std::runtime_error("config line " + std::to_string(line_no) +
                                             ": unterminated section header");
                }
                section = std::string(line.substr(i + 1, close - i - 1));
                continue;
            }

            const size_t eq = line.find('=', i);
            if (eq == std::string_view::npos) {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": expected key = value");
            }
            std::string key(line.substr(i, eq - i));
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            if (key.empty()) {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": empty key");
            }

            size_t vi = eq + 1;
            Value v = detail::parse_value(line, vi, line_no);
            detail::skip_ws(line, vi);
            if (vi < line.size() && line[vi] != '#') {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": trailing garbage after value");
            }

            const std::string full = section.empty() ? key : section + "." + key;
            if (!cfg.values_.emplace(full, std::move(v)).second) {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": duplicate key " + full);
            }
        }
        return cfg;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        out.reserve(values_.size());
        for (const auto& [k, v] : values_) out.push_back(k);
        return out;
    }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        const Value* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw std::runtime_error("config key " + key + " must be a string");
        return std::get<std::string>(v->data);
    }

    std::string require_string(const std::string& key) const {
        if (!has(key)) throw std::runtime_error("missing required config key: " + key);
        return get_string(key);
    }

    int64_t get_int(const std::string& key, int64_t fallback) const {
        const Value* v = find(key);
        if (!v) return fallback;
        if (v->is_int()) return std::get<int64_t>(v->data);
        throw std::runtime_error("config key " + key + " must be an integer");
    }

    double get_double(const std::string& key, double fallback) const {
        const Value* v = find(key);
        if (!v) return fallback;
        if (v->is_double()) return std::get<double>(v->data);
        if (v->is_int()) return static_cast<double>(std::get<int64_t>(v->data));
        throw std::runtime_error("config key " + key + " must be a number");
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const Value* v = find(key);
        if (!v) return fallback;
        if (!v->is_bool()) throw std::runtime_error("config key " + key + " must be a boolean");
        return std::get<bool>(v->data);
    }

    std::vector<std::string> get_string_array(const std::string& key) const {
        const Value* v = find(key);
        if (!v) return {};
        if (!v->is_array()) throw std::runtime_error("config key " + key + " must be an array");
        std::vector<std::string> out;
        for (const auto& e : std::get<Array>(v->data)) {
            if (!e.is_string()) {
                throw std::runtime_error("config key " + key + " must hold strings");
            }
            out.push_back(std::get<std::string>(e.data));
        }
        return out;
    }

    std::vector<double> get_number_array(const std::string& key) const {
        const Value* v = find(key);
        if (!v) return {};
        if (!v->is_array()) throw std::runtime_error("config key " + key + " must be an array");
        std::vector<double> out;
        for (const auto& e : std::get<Array>(v->data)) {
            if (e.is_int()) out.push_back(static_cast<double>(std::get<int64_t>(e.data)));
            else if (e.is_double()) out.push_back(std::get<double>(e.data));
            else throw std::runtime_error("config key " + key + " must hold numbers");
        }
        return out;
    }

    /// Throws when the config holds keys outside the allowed set.
    void reject_unknown_keys(const std::set<std::string>& allowed) const {
        std::string unknown;
        for (const auto& [k, v] : values_) {
            if (!allowed.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
        }
        if (!unknown.empty()) {
            throw std::runtime_error("unknown config keys: " + unknown);
        }
    }

  private:
    const Value* find(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::map<std::string, Value> values_;
};

}  // namespace svipipe::config
