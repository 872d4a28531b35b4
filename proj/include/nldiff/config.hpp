#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nldiff/errors.hpp"

namespace nldiff {

/// Flat INI text: [section] headers, key = value lines, '#' or ';' comments.
/// Every value remembers its line so later validation can point at it.
class IniDocument {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };
    struct Section {
        std::string name;
        int line = 0;
        std::vector<Entry> entries;
    };

    static IniDocument parse(std::istream& in, const std::string& source = "<input>") {
        IniDocument doc;
        doc.source_ = source;
        std::string raw;
        int lineno = 0;
        Section* cur = nullptr;
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = strip_comment(raw);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') doc.fail("unterminated section header", lineno);
                std::string name = trim(line.substr(1, line.size() - 2));
                if (name.empty()) doc.fail("empty section name", lineno);
                if (doc.find_section(name)) doc.fail("duplicate section [" + name + "]", lineno);
                doc.sections_.push_back({name, lineno, {}});
                cur = &doc.sections_.back();
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) doc.fail("expected key = value", lineno);
            if (!cur) doc.fail("key outside any section", lineno);
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) doc.fail("empty key", lineno);
            for (const auto& e : cur->entries)
                if (e.key == key) doc.fail("duplicate key '" + key + "' in [" + cur->name + "]", lineno);
            cur->entries.push_back({key, value, lineno});
        }
        return doc;
    }

    static IniDocument parse_string(const std::string& text, const std::string& source = "<string>") {
        std::istringstream in(text);
        return parse(in, source);
    }

    static IniDocument load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path, 0);
        return parse(in, path);
    }

    const std::string& source() const noexcept { return source_; }
    const std::vector<Section>& sections() const noexcept { return sections_; }

    const Section* find_section(const std::string& name) const {
        for (const auto& s : sections_)
            if (s.name == name) return &s;
        return nullptr;
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        const Section* s = find_section(section);
        if (!s) return nullptr;
        for (const auto& e : s->entries)
            if (e.key == key) return &e;
        return nullptr;
    }

    bool has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

    std::string get_string(const std::string& section, const std::string& key) const {
        return require(section, key).value;
    }
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
        const Entry* e = find(section, key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        const Entry& e = require(section, key);
        return to_double(e);
    }
    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const Entry* e = find(section, key);
        return e ? to_double(*e) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const { return to_int(require(section, key)); }
    long get_int(const std::string& section, const std::string& key, long fallback) const {
        const Entry* e = find(section, key);
        return e ? to_int(*e) : fallback;
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        const std::string v = lower(e->value);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail("expected a boolean for '" + key + "', got '" + e->value + "'", e->line);
    }

    /// Comma separated doubles, e.g. "1, 2.5".
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
        const Entry& e = require(section, key);
        std::vector<double> out;
        for (const auto& item : split(e.value, ',')) out.push_back(to_double(item, e));
        return out;
    }

    /// Rejects keys a reader did not ask for, so typos surface as errors.
    void expect_only(const std::string& section, const std::vector<std::string>& keys) const {
        const Section* s = find_section(section);
        if (!s) return;
        for (const auto& e : s->entries)
            if (std::find(keys.begin(), keys.end(), e.key) == keys.end())
                fail("unknown key '" + e.key + "' in [" + section + "]", e.line);
    }

    [[noreturn]] void fail(const std::string& msg, int line) const {
        throw ConfigError(msg + " (" + source_ + ")", line);
    }

    const Entry& require(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) {
            const Section* s = find_section(section);
            fail("missing key '" + key + "' in [" + section + "]", s ? s->line : 0);
        }
        return *e;
    }

    double to_double(const Entry& e) const { return to_double(e.value, e); }

    double to_double(const std::string& text, const Entry& e) const {
        const std::string v = trim(text);
        double out = 0.0;
        const auto* end = v.data() + v.size();
        const auto res = std::from_chars(v.data(), end, out);
        if (v.empty() || res.ec != std::errc{} || res.ptr != end)
            fail("expected a number for '" + e.key + "', got '" + v + "'", e.line);
        return out;
    }

    long to_int(const Entry& e) const {
        long out = 0;
        const auto* end = e.value.data() + e.value.size();
        const auto res = std::from_chars(e.value.data(), end, out);
        if (e.value.empty() || res.ec != std::errc{} || res.ptr != end)
            fail("expected an integer for '" + e.key + "', got '" + e.value + "'", e.line);
        return out;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }
    static std::string lower(std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }
    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, sep)) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

private:
    // A comment starts at '#' or ';' when it opens the line or follows whitespace.
    static std::string strip_comment(const std::string& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if ((s[i] == '#' || s[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1]))))
                return s.substr(0, i);
        return s;
    }

    std::string source_;
    std::vector<Section> sections_;
};

}  // namespace nldiff
