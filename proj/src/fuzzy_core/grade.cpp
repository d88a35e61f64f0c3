#include "memfuzz/error.hpp"
#include "memfuzz/fuzzy_core.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

namespace memfuzz {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw PreconditionError("malformed grade '" + std::string(whole) + "'");
    }
    return out;
}

} // namespace

Grade::Grade(std::int64_t numerator, std::int64_t denominator) {
    if (denominator <= 0 || numerator < 0 || numerator > denominator) {
        throw PreconditionError("grade " + std::to_string(numerator) + "/" + std::to_string(denominator) +
                                " is not in [0,1]");
    }
    const std::int64_t g = std::gcd(numerator, denominator);
    num_ = numerator / g;
    den_ = denominator / g;
}

Grade Grade::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Grade(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        const std::string_view int_part = text.substr(0, dot);
        const std::string_view frac_part = text.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 15) {
            throw PreconditionError("malformed grade '" + std::string(text) + "'");
        }
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        const std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
        return Grade(whole * den + parse_int(frac_part, text), den);
    }
    return Grade(parse_int(text, text), 1);
}

std::string Grade::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Grade& a, const Grade& b) {
    const auto lhs = static_cast<__int128>(a.num_) * b.den_;
    const auto rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

GradeSet::GradeSet() : grades_{Grade::zero(), Grade::one()} {}

GradeSet::GradeSet(std::vector<Grade> grades) : grades_(std::move(grades)) {
    std::sort(grades_.begin(), grades_.end());
    if (std::adjacent_find(grades_.begin(), grades_.end()) != grades_.end()) {
        throw PreconditionError("grade set contains a repeated grade");
    }
    if (grades_.empty() || !grades_.front().is_zero() || !grades_.back().is_one()) {
        throw PreconditionError("grade set must contain 0 and 1");
    }
}

bool GradeSet::contains(const Grade& g) const {
    return std::binary_search(grades_.begin(), grades_.end(), g);
}

std::optional<std::size_t> GradeSet::positive_index(const Grade& g) const {
    if (g.is_zero()) return std::nullopt;
    auto it = std::lower_bound(grades_.begin(), grades_.end(), g);
    if (it == grades_.end() || *it != g) return std::nullopt;
    return static_cast<std::size_t>(it - grades_.begin()) - 1;
}

Grade GradeSet::successor(const Grade& t) const {
    auto idx = positive_index(t);
    if (!idx || t.is_one()) {
        throw PreconditionError("successor is defined on I+ minus {1}; got " + t.to_string());
    }
    return grades_[*idx + 2];
}

std::string GradeSet::to_string() const {
    std::string out;
    for (const Grade& g : grades_) {
        if (!out.empty()) out += ' ';
        out += g.to_string();
    }
    return out;
}

} // namespace memfuzz
