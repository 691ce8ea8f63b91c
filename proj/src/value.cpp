#include "planloop/value.hpp"

namespace planloop {

bool Value::truthy() const {
    if (is_none()) return false;
    if (is_bool()) return as_bool();
    if (is_int()) return as_int() != 0;
    if (is_text()) return !as_text().empty();
    return !as_list().empty();
}

std::string Value::to_text() const {
    if (is_none()) return "None";
    if (is_bool()) return as_bool() ? "True" : "False";
    if (is_int()) return std::to_string(as_int());
    if (is_text()) return as_text();
    std::string out = "[";
    const auto& items = as_list();
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        if (items[i].is_text()) {
            out += "'" + items[i].as_text() + "'";
        } else {
            out += items[i].to_text();
        }
    }
    out += "]";
    return out;
}

bool Value::operator==(const Value& other) const {
    return v_ == other.v_;
}

} // namespace planloop
