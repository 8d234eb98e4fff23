#include "ccfsim/toml.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ccfsim::toml {

Value Value::boolean(bool v) {
    Value x;
    x.type = Type::Bool;
    x.b = v;
    return x;
}
Value Value::integer(std::int64_t v) {
    Value x;
    x.type = Type::Int;
    x.i = v;
    return x;
}
Value Value::real(double v) {
    Value x;
    x.type = Type::Float;
    x.f = v;
    return x;
}
Value Value::string(std::string v) {
    Value x;
    x.type = Type::String;
    x.s = std::move(v);
    return x;
}
Value Value::array(std::vector<Value> v) {
    Value x;
    x.type = Type::Array;
    x.arr = std::move(v);
    return x;
}

const char* Value::type_name() const {
    switch (type) {
        case Type::Bool: return "boolean";
        case Type::Int: return "integer";
        case Type::Float: return "float";
        case Type::String: return "string";
        case Type::Array: return "array";
    }
    return "?";
}

namespace {

[[noreturn]] void type_error(const std::string& key, const Value& v, const char* wanted) {
    throw ConfigError("key '" + key + "': expected " + wanted + ", got " + v.type_name());
}

}  // namespace

bool Value::as_bool(const std::string& key) const {
    if (!is_bool()) type_error(key, *this, "boolean");
    return b;
}
std::int64_t Value::as_int(const std::string& key) const {
    if (!is_int()) type_error(key, *this, "integer");
    return i;
}
double Value::as_float(const std::string& key) const {
    if (is_int()) return static_cast<double>(i);
    if (!is_float()) type_error(key, *this, "number");
    return f;
}
const std::string& Value::as_string(const std::string& key) const {
    if (!is_string()) type_error(key, *this, "string");
    return s;
}
const std::vector<Value>& Value::as_array(const std::string& key) const {
    if (!is_array()) type_error(key, *this, "array");
    return arr;
}

namespace {

struct Parser {
    const std::string& text;
    const std::string& source;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }

    void skip_to_eol() {
        while (!eof() && peek() != '\n') ++pos;
    }

    // Whitespace, newlines and comments between statements.
    void skip_blank() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else if (c == '\n') {
                take();
            } else if (c == '#') {
                skip_to_eol();
            } else {
                break;
            }
        }
    }

    static bool is_bare_key_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string parse_bare_key() {
        std::string key;
        while (!eof() && is_bare_key_char(peek())) key.push_back(text[pos++]);
        if (key.empty()) fail("expected a key");
        return key;
    }

    std::string parse_string_literal() {
        if (eof() || peek() != '"') fail("expected '\"'");
        ++pos;
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\n') fail("unterminated string");
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                const char e = take();
                switch (e) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    Value parse_number() {
        const std::size_t start = pos;
        bool is_float = false;
        if (!eof() && (peek() == '+' || peek() == '-')) ++pos;
        while (!eof()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') {
                ++pos;
            } else if (c == '.' || c == 'e' || c == 'E') {
                is_float = true;
                ++pos;
                if (!eof() && (peek() == '+' || peek() == '-')) ++pos;
            } else {
                break;
            }
        }
        std::string token = text.substr(start, pos - start);
        std::erase(token, '_');
        if (token.empty() || token == "+" || token == "-") fail("malformed number");
        errno = 0;
        char* end = nullptr;
        if (is_float) {
            const double v = std::strtod(token.c_str(), &end);
            if (errno == ERANGE) fail("float out of range: " + token);
            if (end == nullptr || *end != '\0') fail("malformed float: " + token);
            return Value::real(v);
        }
        const long long v = std::strtoll(token.c_str(), &end, 10);
        if (errno == ERANGE) fail("integer out of range: " + token);
        if (end == nullptr || *end != '\0') fail("malformed integer: " + token);
        return Value::integer(v);
    }

    Value parse_value() {
        if (eof()) fail("expected a value");
        const char c = peek();
        Value v;
        if (c == '"') {
            v = Value::string(parse_string_literal());
        } else if (c == '[') {
            ++pos;
            std::vector<Value> items;
            skip_array_ws();
            if (!eof() && peek() == ']') {
                ++pos;
            } else {
                while (true) {
                    items.push_back(parse_value());
                    skip_array_ws();
                    if (eof()) fail("unterminated array");
                    if (peek() == ',') {
                        ++pos;
                        skip_array_ws();
                        if (!eof() && peek() == ']') {  // trailing comma
                            ++pos;
                            break;
                        }
                        continue;
                    }
                    if (peek() == ']') {
                        ++pos;
                        break;
                    }
                    fail("expected ',' or ']' in array");
                }
            }
            v = Value::array(std::move(items));
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                   c == '.') {
            v = parse_number();
        } else if (is_bare_key_char(c)) {
            const std::string word = parse_bare_key();
            if (word == "true") v = Value::boolean(true);
            else if (word == "false") v = Value::boolean(false);
            else if (word == "inf") v = Value::real(HUGE_VAL);
            else if (word == "nan") fail("nan is not accepted in configs");
            else fail("unrecognized value '" + word + "'");
        } else {
            fail(std::string("unexpected character '") + c + "'");
        }
        v.line = line;
        return v;
    }

    // Arrays may span lines; comments inside them are allowed.
    void skip_array_ws() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') ++pos;
            else if (c == '\n') take();
            else if (c == '#') skip_to_eol();
            else break;
        }
    }

    Document run() {
        Document doc;
        std::string table;
        while (true) {
            skip_blank();
            if (eof()) break;
            if (peek() == '[') {
                ++pos;
                skip_inline_ws();
                std::string name = parse_bare_key();
                while (!eof() && peek() == '.') {
                    ++pos;
                    name += '.' + parse_bare_key();
                }
                skip_inline_ws();
                if (eof() || peek() != ']') fail("expected ']' after table name");
                ++pos;
                skip_inline_ws();
                if (!eof() && peek() != '\n' && peek() != '#' && peek() != '\r')
                    fail("unexpected text after table header");
                table = name;
                continue;
            }
            const int key_line = line;
            std::string key = parse_bare_key();
            while (!eof() && peek() == '.') {
                ++pos;
                key += '.' + parse_bare_key();
            }
            skip_inline_ws();
            if (eof() || peek() != '=') fail("expected '=' after key '" + key + "'");
            ++pos;
            skip_inline_ws();
            Value v = parse_value();
            v.line = key_line;
            skip_inline_ws();
            if (!eof() && peek() != '\n' && peek() != '#' && peek() != '\r')
                fail("unexpected text after value for key '" + key + "'");
            const std::string full = table.empty() ? key : table + '.' + key;
            if (doc.contains(full)) fail("duplicate key '" + full + "'");
            doc.set(full, std::move(v));
        }
        return doc;
    }
};

}  // namespace

Document Document::parse(const std::string& text, const std::string& source_name) {
    Parser p{text, source_name};
    Document doc = p.run();
    doc.source_ = source_name;
    return doc;
}

Document Document::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Document::set(const std::string& dotted_key, Value v) {
    if (values_.find(dotted_key) == values_.end()) order_.push_back(dotted_key);
    values_[dotted_key] = std::move(v);
}

bool Document::contains(const std::string& dotted_key) const {
    return values_.find(dotted_key) != values_.end();
}

const Value* Document::find(const std::string& dotted_key) const {
    const auto it = values_.find(dotted_key);
    return it == values_.end() ? nullptr : &it->second;
}

const Value& Document::at(const std::string& dotted_key) const {
    const Value* v = find(dotted_key);
    if (v == nullptr) throw ConfigError("missing key '" + dotted_key + "'");
    return *v;
}

namespace {

std::string format_float(double v) {
    if (v == HUGE_VAL) return "inf";
    char buf[64];
    // Integral values print in plain decimal; %g would switch to scientific
    // notation for anything past six digits.
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return buf;
    }
    // Otherwise the shortest representation that parses back to the same double.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    std::string s = buf;
    // Keep floats distinguishable from integers after a round-trip.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string escape_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_value(const Value& v) {
    switch (v.type) {
        case Value::Type::Bool: return v.b ? "true" : "false";
        case Value::Type::Int: return std::to_string(v.i);
        case Value::Type::Float: return format_float(v.f);
        case Value::Type::String: return escape_string(v.s);
        case Value::Type::Array: {
            std::string out = "[";
            for (std::size_t i = 0; i < v.arr.size(); ++i) {
                if (i > 0) out += ", ";
                out += format_value(v.arr[i]);
            }
            out += ']';
            return out;
        }
    }
    return "?";
}

std::string Document::serialize() const {
    std::string out;
    std::string current_table;
    bool first = true;
    for (const std::string& key : order_) {
        const auto dot = key.rfind('.');
        const std::string table = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
        if (table != current_table || first) {
            if (!first) out += '\n';
            if (!table.empty()) out += '[' + table + "]\n";
            current_table = table;
        }
        out += leaf + " = " + format_value(values_.at(key)) + '\n';
        first = false;
    }
    return out;
}

}  // namespace ccfsim::toml
