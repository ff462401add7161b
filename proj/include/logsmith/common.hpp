#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logsmith {

// Fatal error with a short machine-readable code ("auth_error",
// "no_parseable_sources", ...) plus a human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Non-fatal findings accumulated by analyses.
struct Diagnostic {
    std::string source;   // module or file that raised it
    std::string message;
    int line = 0;
};

using Diagnostics = std::vector<Diagnostic>;

inline void diag(Diagnostics& out, std::string source, std::string message, int line = 0) {
    out.push_back(Diagnostic{std::move(source), std::move(message), line});
}

// ---- string helpers ----

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) a++;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) b--;
    return std::string(s.substr(a, b - a));
}

inline std::string rtrim(std::string_view s) {
    size_t b = s.size();
    while (b > 0 && std::isspace(static_cast<unsigned char>(s[b - 1]))) b--;
    return std::string(s.substr(0, b));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); i++) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); i++) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string remove_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

// Splits text into lines without the trailing '\n'. A final newline does not
// produce an extra empty line; join_lines restores the original bytes.
struct LineBuffer {
    std::vector<std::string> lines;
    bool trailing_newline = true;

    static LineBuffer from_text(std::string_view text) {
        LineBuffer lb;
        lb.trailing_newline = !text.empty() && text.back() == '\n';
        size_t start = 0;
        for (size_t i = 0; i < text.size(); i++) {
            if (text[i] == '\n') {
                lb.lines.emplace_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (start < text.size()) lb.lines.emplace_back(text.substr(start));
        return lb;
    }

    std::string to_text() const {
        std::string out;
        for (size_t i = 0; i < lines.size(); i++) {
            out += lines[i];
            if (i + 1 < lines.size() || trailing_newline) out += '\n';
        }
        return out;
    }
};

inline std::string leading_indent(std::string_view line) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) i++;
    return std::string(line.substr(0, i));
}

// ---- file helpers ----

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace logsmith
