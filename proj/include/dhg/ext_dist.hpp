#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

namespace dhg {

// Extended nonnegative integer distance: a finite value or a dedicated
// infinity. Addition saturates at infinity; infinity compares greater than
// every finite value. Deliberately not a max-int sentinel.
class ext_dist {
public:
    constexpr ext_dist() : inf_(true), v_(0) {}

    static constexpr ext_dist finite(std::int64_t v) {
        ext_dist d;
        d.inf_ = false;
        d.v_ = v;
        return d;
    }
    static constexpr ext_dist infinity() { return ext_dist(); }

    constexpr bool is_infinite() const { return inf_; }
    constexpr bool is_finite() const { return !inf_; }

    // Only valid on finite values.
    constexpr std::int64_t value() const { return v_; }

    friend constexpr ext_dist operator+(ext_dist a, ext_dist b) {
        if (a.inf_ || b.inf_) return infinity();
        return finite(a.v_ + b.v_);
    }
    friend constexpr ext_dist operator+(ext_dist a, std::int64_t b) {
        return a + finite(b);
    }

    friend constexpr bool operator==(ext_dist a, ext_dist b) {
        if (a.inf_ != b.inf_) return false;
        return a.inf_ || a.v_ == b.v_;
    }
    friend constexpr bool operator!=(ext_dist a, ext_dist b) { return !(a == b); }
    friend constexpr bool operator<(ext_dist a, ext_dist b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend constexpr bool operator<=(ext_dist a, ext_dist b) { return a < b || a == b; }
    friend constexpr bool operator>(ext_dist a, ext_dist b) { return b < a; }
    friend constexpr bool operator>=(ext_dist a, ext_dist b) { return b <= a; }

    friend constexpr bool operator==(ext_dist a, std::int64_t b) { return !a.inf_ && a.v_ == b; }
    friend constexpr bool operator<=(ext_dist a, std::int64_t b) { return !a.inf_ && a.v_ <= b; }

    static constexpr ext_dist min(ext_dist a, ext_dist b) { return a < b ? a : b; }
    static constexpr ext_dist max(ext_dist a, ext_dist b) { return a < b ? b : a; }

    std::string str() const { return inf_ ? "inf" : std::to_string(v_); }

    friend std::ostream& operator<<(std::ostream& os, ext_dist d) { return os << d.str(); }

private:
    bool inf_;
    std::int64_t v_;
};

} // namespace dhg
