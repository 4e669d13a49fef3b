#include "kpz/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "kpz/error.hpp"

namespace kpz::config {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    io::Json run() {
        io::Json root = io::Json::object();
        io::Json* table = &root;
        while (!at_end()) {
            skip_blank();
            if (at_end()) break;
            if (peek() == '[') {
                table = &open_table(root);
            } else {
                const std::string key = parse_key();
                skip_inline_space();
                expect('=');
                skip_inline_space();
                if (table->contains(key)) error("duplicate key '" + key + "'");
                (*table)[key] = parse_value();
            }
            end_line();
        }
        return root;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorCode::Config, "line " + std::to_string(line_) + ": " + what);
    }
    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    char get() {
        const char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    void expect(char c) {
        if (peek() != c) error(std::string("expected '") + c + "'");
        get();
    }
    void skip_inline_space() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!at_end() && peek() != '\n') get();
    }
    // Whitespace, newlines and comments.
    void skip_blank() {
        for (;;) {
            skip_inline_space();
            skip_comment();
            if (!at_end() && (peek() == '\n' || peek() == '\r')) {
                get();
                continue;
            }
            return;
        }
    }
    void end_line() {
        skip_inline_space();
        skip_comment();
        if (peek() == '\r') get();
        if (!at_end() && peek() != '\n') error("unexpected trailing characters");
        if (!at_end()) get();
    }

    static bool bare(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

    std::string parse_key() {
        if (peek() == '"') return parse_basic_string();
        std::string k;
        while (!at_end() && bare(peek())) k += get();
        if (k.empty()) error("expected a key");
        return k;
    }

    io::Json& open_table(io::Json& root) {
        expect('[');
        if (peek() == '[') error("arrays of tables are not supported");
        io::Json* t = &root;
        for (;;) {
            skip_inline_space();
            const std::string part = parse_key();
            skip_inline_space();
            if (!t->contains(part)) (*t)[part] = io::Json::object();
            t = &(*t)[part];
            if (!t->is_object()) error("'" + part + "' is not a table");
            if (peek() == '.') {
                get();
                continue;
            }
            break;
        }
        expect(']');
        return *t;
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') error("unterminated string");
            const char c = get();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            const char e = get();
            switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            default: error(std::string("unsupported escape \\") + e);
            }
        }
    }

    std::string parse_literal_string() {
        expect('\'');
        std::string out;
        while (peek() != '\'') {
            if (at_end() || peek() == '\n') error("unterminated string");
            out += get();
        }
        get();
        return out;
    }

    io::Json parse_value() {
        const char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '\'') return parse_literal_string();
        if (c == '[') return parse_array();
        if (s_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        return parse_number();
    }

    io::Json parse_array() {
        expect('[');
        io::Json arr = io::Json::array();
        for (;;) {
            skip_blank();
            if (peek() == ']') {
                get();
                return arr;
            }
            arr.push_back(parse_value());
            skip_blank();
            if (peek() == ',') {
                get();
                continue;
            }
            skip_blank();
            expect(']');
            return arr;
        }
    }

    io::Json parse_number() {
        std::string tok;
        while (!at_end() && (bare(peek()) || peek() == '.' || peek() == '+')) tok += get();
        if (tok.empty()) error("expected a value");
        std::string clean;
        for (char ch : tok)
            if (ch != '_') clean += ch;
        if (clean == "inf" || clean == "+inf") return std::numeric_limits<double>::infinity();
        if (clean == "-inf") return -std::numeric_limits<double>::infinity();
        if (clean == "nan" || clean == "+nan" || clean == "-nan") return std::numeric_limits<double>::quiet_NaN();
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
        const char* e = clean.data() + clean.size();
        if (!is_float) {
            if (clean[0] == '-') {
                std::int64_t v = 0;
                const auto [p, ec] = std::from_chars(b, e, v);
                if (ec == std::errc{} && p == e) return v;
            } else {
                std::uint64_t v = 0;
                const auto [p, ec] = std::from_chars(b, e, v);
                if (ec == std::errc{} && p == e) return v;
            }
            error("bad integer '" + tok + "'");
        }
        double v = 0.0;
        const auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || p != e) error("bad number '" + tok + "'");
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

io::Json parse_toml(std::string_view text) { return Parser(text).run(); }

io::Json load_toml(const std::filesystem::path& path) {
    try {
        return parse_toml(io::read_text(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) fail(ErrorCode::Config, path.string() + ": " + e.what());
        throw;
    }
}

}  // namespace kpz::config
