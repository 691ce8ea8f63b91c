#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace planloop {

// Minimal expected-style carrier for operations whose failure is a normal
// outcome (parse errors, exhausted scripted queues, transport failures).
// Contract violations still throw.
template <typename T, typename E = std::string>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}

    static Result failure(E error) {
        Result r;
        r.error_ = std::move(error);
        return r;
    }

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!value_) throw std::logic_error("Result::value() on failure");
        return *value_;
    }
    T&& value() && {
        if (!value_) throw std::logic_error("Result::value() on failure");
        return std::move(*value_);
    }
    const E& error() const {
        if (!error_) throw std::logic_error("Result::error() on success");
        return *error_;
    }

private:
    Result() = default;
    std::optional<T> value_;
    std::optional<E> error_;
};

} // namespace planloop
