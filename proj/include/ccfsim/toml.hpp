#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccfsim/errors.hpp"

// Strict subset of TOML covering what run configs need: [table] headers, bare
// keys, strings, integers, floats, booleans, nested inline arrays and # comments.
// Anything outside the subset is a ConfigError naming file, line and reason.
namespace ccfsim::toml {

struct Value {
    enum class Type { Bool, Int, Float, String, Array };

    Type type = Type::Bool;
    bool b = false;
    std::int64_t i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Value> arr;
    int line = 0;  // for diagnostics

    static Value boolean(bool v);
    static Value integer(std::int64_t v);
    static Value real(double v);
    static Value string(std::string v);
    static Value array(std::vector<Value> v);

    bool is_bool() const { return type == Type::Bool; }
    bool is_int() const { return type == Type::Int; }
    bool is_float() const { return type == Type::Float; }
    bool is_string() const { return type == Type::String; }
    bool is_array() const { return type == Type::Array; }
    const char* type_name() const;

    bool as_bool(const std::string& key) const;
    std::int64_t as_int(const std::string& key) const;
    double as_float(const std::string& key) const;  // accepts integers
    const std::string& as_string(const std::string& key) const;
    const std::vector<Value>& as_array(const std::string& key) const;
};

// Key/value store with dotted keys ("table.key"). Insertion order is preserved
// so serialization is stable.
class Document {
public:
    static Document parse(const std::string& text, const std::string& source_name);
    static Document parse_file(const std::string& path);

    void set(const std::string& dotted_key, Value v);
    bool contains(const std::string& dotted_key) const;
    const Value* find(const std::string& dotted_key) const;
    const Value& at(const std::string& dotted_key) const;

    const std::vector<std::string>& keys() const { return order_; }
    const std::string& source_name() const { return source_; }

    // Canonical text form: keys grouped by table in first-appearance order,
    // floats printed with round-trip precision. parse(serialize(d)) == d and
    // serializing again yields the identical bytes.
    std::string serialize() const;

private:
    std::map<std::string, Value> values_;
    std::vector<std::string> order_;
    std::string source_ = "<memory>";
};

std::string format_value(const Value& v);

}  // namespace ccfsim::toml
