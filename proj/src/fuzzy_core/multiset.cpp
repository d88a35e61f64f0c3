#include "memfuzz/error.hpp"
#include "memfuzz/fuzzy_core.hpp"

#include <charconv>
#include <limits>

namespace memfuzz {

// ExtNat

ExtNat ExtNat::parse(std::string_view text) {
    if (text == "inf") return infinity();
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw PreconditionError("malformed count '" + std::string(text) + "'");
    }
    return ExtNat{value};
}

std::uint64_t ExtNat::finite() const {
    if (infinite_) throw ArithmeticError("finite value requested from infinity");
    return value_;
}

std::string ExtNat::to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

ExtNat& ExtNat::operator+=(ExtNat rhs) {
    if (infinite_ || rhs.infinite_) {
        *this = infinity();
        return *this;
    }
    if (value_ > std::numeric_limits<std::uint64_t>::max() - rhs.value_) {
        throw ArithmeticError("extended natural overflow");
    }
    value_ += rhs.value_;
    return *this;
}

ExtNat& ExtNat::operator-=(ExtNat rhs) {
    if (infinite_) {
        if (rhs.infinite_) throw ArithmeticError("inf - inf is undefined");
        return *this;
    }
    if (rhs.infinite_ || rhs.value_ > value_) {
        throw ArithmeticError("extended natural underflow: " + to_string() + " - " + rhs.to_string());
    }
    value_ -= rhs.value_;
    return *this;
}

std::strong_ordering operator<=>(const ExtNat& a, const ExtNat& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
}

// FuzzyMultiset

ExtNat FuzzyMultiset::count(ReactiveId v, const Grade& t) const {
    auto it = entries_.find({v, t});
    return it == entries_.end() ? ExtNat{} : it->second;
}

void FuzzyMultiset::set(ReactiveId v, const Grade& t, ExtNat n) {
    if (t.is_zero()) throw PreconditionError("fuzzy multisets carry no grade-0 entries");
    if (n.is_zero()) {
        entries_.erase({v, t});
    } else {
        entries_[{v, t}] = n;
    }
}

void FuzzyMultiset::add(ReactiveId v, const Grade& t, ExtNat n) {
    if (n.is_zero()) return;
    set(v, t, count(v, t) + n);
}

void FuzzyMultiset::subtract(ReactiveId v, const Grade& t, ExtNat n) {
    if (n.is_zero()) return;
    set(v, t, count(v, t) - n);
}

ExtNat level_sum(const FuzzyMultiset& f, ReactiveId v, const Grade& t, const GradeSet& grades) {
    if (!grades.contains_positive(t)) {
        throw PreconditionError("level_sum: grade " + t.to_string() + " is not in I+");
    }
    ExtNat total;
    for (auto it = f.entries().lower_bound({v, t}); it != f.entries().end() && it->first.first == v; ++it) {
        total += it->second;
    }
    return total;
}

} // namespace memfuzz
