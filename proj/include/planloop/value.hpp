#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace planloop {

// Runtime value of the plan language: none, bool, integer, text, or a flat
// list of values (lists only ever hold scalars; the grammar has no nested
// list literals).
class Value {
public:
    using List = std::vector<Value>;

    Value() : v_(std::monostate{}) {}
    Value(bool b) : v_(b) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(List l) : v_(std::move(l)) {}

    static Value none() { return Value(); }

    bool is_none() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_list() const { return std::holds_alternative<List>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    const List& as_list() const { return std::get<List>(v_); }

    // Python-style truthiness: None and empty containers are false.
    bool truthy() const;

    // Rendering used by text interpolation and report messages: None, True,
    // plain digits, raw text, ['a', 'b'].
    std::string to_text() const;

    bool operator==(const Value& other) const;
    bool operator!=(const Value& other) const { return !(*this == other); }

private:
    std::variant<std::monostate, bool, std::int64_t, std::string, List> v_;
};

} // namespace planloop
